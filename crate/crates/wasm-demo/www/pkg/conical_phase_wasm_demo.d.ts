/* tslint:disable */
/* eslint-disable */

export function capPhases(theta: number): Float64Array;

export function doubletPhase(g: number, omega: number, excited: boolean): number;

export function doubletPopulations(g: number, omega: number, excited: boolean, samples: number): Float64Array;

export function loopWinding(k: number, mu: number, lambda: number, cx: number, cy: number, r: number): Int32Array;

export function quarticCis(k: number, mu: number, lambda: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly capPhases: (a: number) => [number, number, number, number];
    readonly doubletPhase: (a: number, b: number, c: number) => [number, number, number];
    readonly doubletPopulations: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly loopWinding: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly quarticCis: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
