/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const classify_state: (a: number, b: number, c: number) => [number, number];
export const energy_growth: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const reduced_spectrum: (a: number, b: number, c: number) => [number, number];
export const regime_map: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
