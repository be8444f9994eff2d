// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod expr;
pub mod run;
pub mod scenario;
pub mod table;
