/* tslint:disable */
/* eslint-disable */

/**
 * p_{−1} after the drive pulse against spin–injection detuning.
 */
export function detuning_sweep(delta_sm_khz: number, omega_khz: number, t2_star_us: number, drive_us: number, min_khz: number, max_khz: number, steps: number): string;

/**
 * Normalized locked PSD against mechanics–injection detuning.
 */
export function lock_profile(gamma_tune_khz: number, min_khz: number, max_khz: number, steps: number): string;

/**
 * Cooperativity table for the bundled presets.
 */
export function roadmap(factor4: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly detuning_sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly lock_profile: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly roadmap: (a: number) => [number, number];
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
