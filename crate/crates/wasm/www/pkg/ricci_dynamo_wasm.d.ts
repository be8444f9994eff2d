/* tslint:disable */
/* eslint-disable */

/**
 * Regime of a matter state `(ρ, θ, R)`.
 */
export function classify_state(rho: number, theta: number, ricci: number): string;

/**
 * `log ε(t)` for the reduced model from `B₀ = (1, 0)`, with the fitted rate.
 */
export function energy_growth(ricci: number, theta: number, eta: number, t_end: number, samples: number): string;

/**
 * Reduced-operator eigenvalues at `(R, θ, η)` from the characteristic
 * quadratic, the printed closed form and the companion matrix.
 */
export function reduced_spectrum(ricci: number, theta: number, eta: number): string;

/**
 * Regime codes on an `n × n` grid over `ρ ∈ [0, rho_max]`, `R ∈ [r_min, r_max]`.
 */
export function regime_map(rho_max: number, r_min: number, r_max: number, theta: number, n: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly classify_state: (a: number, b: number, c: number) => [number, number];
    readonly energy_growth: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly reduced_spectrum: (a: number, b: number, c: number) => [number, number];
    readonly regime_map: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
