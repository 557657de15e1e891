/* tslint:disable */
/* eslint-disable */

/**
 * `‖dω_J‖∞` of the CP¹ almost hyper-Hermitian structure on an `n × n` grid of
 * `z ∈ [−extent, extent]²` with `w` fixed; row-major in `Im z`, NaN where
 * `1 + zw` vanishes.
 */
export function dj_field(n: number, extent: number, w_re: number, w_im: number): Float64Array;

/**
 * Eguchi-Hanson Monge-Ampère residual over `z = x`, `u = iy` on an `n × n`
 * grid, as `[x, y, residual]` triples.
 */
export function eh_residual(n: number, extent: number): Float64Array;

/**
 * Geodesic from `(z, w)` with velocity `(p, q)` on a one-dimensional model
 * (`cp1`, `disk`, `flat1`). Rows of `[t, Re z, Im z, Re w, Im w]`.
 */
export function geodesic(model: string, z_re: number, z_im: number, w_re: number, w_im: number, p_re: number, p_im: number, q_re: number, q_im: number, t: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly dj_field: (a: number, b: number, c: number, d: number) => [number, number];
    readonly eh_residual: (a: number, b: number) => [number, number, number, number];
    readonly geodesic: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
