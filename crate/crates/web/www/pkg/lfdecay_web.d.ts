/* tslint:disable */
/* eslint-disable */

/**
 * Harmonic amplitudes A_k as `[k_min, A_{k_min}, …, A_{k_max}]`.
 */
export function harmonic_spectrum(x: number, freq_ratio: number, order: string): Float64Array;

/**
 * γ̄(t)/γ on `samples` uniform points of [0, t_end].
 */
export function rate_curve(x: number, freq_ratio: number, omega_over_gamma: number, phase: number, order: string, t_end: number, samples: number): Float64Array;

/**
 * Upper-level inversion on `samples` uniform points of [0, t_end].
 *
 * Returns `3·samples` values: the grid, the raw ⟨S_z⟩ and the
 * carrier-averaged ⟨S_z⟩, one block after another.
 */
export function sz_trajectory(x: number, freq_ratio: number, omega_over_gamma: number, phase: number, order: string, t_end: number, samples: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly harmonic_spectrum: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly rate_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly sz_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
