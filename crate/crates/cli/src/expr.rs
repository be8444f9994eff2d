//! Component expressions over `x` and `y` for velocity fields and conformal
//! factors: numbers, `pi`, `+ - * /`, parentheses, `sin`, `cos`, `exp`.

use exmex::{ops_factory, BinOp, Express, FlatEx, MakeOperators, Operator};

ops_factory!(
    FieldOps,
    f64,
    Operator::make_bin(
        "*",
        BinOp {
            apply: |a, b| a * b,
            prio: 2,
            is_commutative: true,
        }
    ),
    Operator::make_bin(
        "/",
        BinOp {
            apply: |a, b| a / b,
            prio: 3,
            is_commutative: false,
        }
    ),
    Operator::make_bin_unary(
        "+",
        BinOp {
            apply: |a, b| a + b,
            prio: 0,
            is_commutative: true,
        },
        |a| a
    ),
    Operator::make_bin_unary(
        "-",
        BinOp {
            apply: |a, b| a - b,
            prio: 1,
            is_commutative: false,
        },
        |a| -a
    ),
    Operator::make_unary("sin", |a| a.sin()),
    Operator::make_unary("cos", |a| a.cos()),
    Operator::make_unary("exp", |a| a.exp()),
    Operator::make_constant("pi", std::f64::consts::PI)
);

/// A parsed scalar expression in `x` and `y`.
#[derive(Debug, Clone)]
pub struct FieldExpr {
    expr: FlatEx<f64, FieldOps>,
    // position of x and y in the evaluation slice, if used
    slots: Vec<Var>,
}

#[derive(Debug, Clone, Copy)]
enum Var {
    X,
    Y,
}

impl FieldExpr {
    pub fn parse(text: &str) -> Result<Self, String> {
        let expr = FlatEx::<f64, FieldOps>::parse(text).map_err(|e| format!("cannot parse `{text}`: {e}"))?;
        let slots = expr
            .var_names()
            .iter()
            .map(|name| match name.as_str() {
                "x" => Ok(Var::X),
                "y" => Ok(Var::Y),
                other => Err(format!(
                    "unknown name `{other}` in `{text}` (only x, y and pi are defined)"
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { expr, slots })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let vars: Vec<f64> = self
            .slots
            .iter()
            .map(|v| match v {
                Var::X => x,
                Var::Y => y,
            })
            .collect();
        self.expr.eval(&vars).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_grammar() {
        let e = FieldExpr::parse("2*sin(x) - cos(y)/2 + exp(0)").unwrap();
        assert!((e.eval(1.0, 2.0) - (2.0 * 1f64.sin() - 2f64.cos() / 2.0 + 1.0)).abs() < 1e-15);
        let e = FieldExpr::parse("-y*pi").unwrap();
        assert_eq!(e.eval(5.0, 1.0), -std::f64::consts::PI);
        assert_eq!(FieldExpr::parse("1/2").unwrap().eval(0.0, 0.0), 0.5);
        assert_eq!(FieldExpr::parse("3").unwrap().eval(0.0, 0.0), 3.0);
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(FieldExpr::parse("sin(z)").is_err());
        assert!(FieldExpr::parse("tan(x)").is_err());
        assert!(FieldExpr::parse("sin(x").is_err());
    }
}
