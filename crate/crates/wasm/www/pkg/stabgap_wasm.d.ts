/* tslint:disable */
/* eslint-disable */

/**
 * Majorana stars of a spin state and the entropies of both qubit encodings.
 */
export function majoranaStars(two_j: number, re: Float64Array, im: Float64Array): string;

/**
 * Exact average and gap of the spin-0 sector of `faces` spins `two_j / 2`.
 */
export function polyhedronGap(faces: number, two_j: number): string;

/**
 * Entropies of a state on `n` qudits of dimension `d`, given split
 * real and imaginary amplitudes.
 */
export function stateEntropies(d: number, n: number, re: Float64Array, im: Float64Array): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly majoranaStars: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly polyhedronGap: (a: number, b: number) => [number, number, number, number];
    readonly stateEntropies: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
