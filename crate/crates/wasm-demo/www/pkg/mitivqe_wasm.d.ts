/* tslint:disable */
/* eslint-disable */

/**
 * Exact energies while parameter `index` sweeps `[-π, π]` in `points`
 * steps, all others held at `theta`.
 */
export function energy_scan(theta: Float64Array, index: number, points: number): Float64Array;

/**
 * Exact energy at `theta` (16 values; anything else means the hardware
 * parameters).
 */
export function exact_energy(theta: Float64Array): number;

export function ground_energy(): number;

export function hardware_theta(): Float64Array;

/**
 * Readout-only noise with symmetric flip probability `eps`. Returns
 * `[unmitigated, T-REx, exact, λ(Z0), λ(Z0Z1), λ(Z0Z1Z2), λ(Z0Z1Z2Z3)]`.
 */
export function trex_demo(theta: Float64Array, eps: number, shots: number, seed: number): Float64Array;

/**
 * Fold the ansatz at scales 1, 3, 5 under depolarizing noise and
 * extrapolate. Returns `[e1, e3, e5, linear, quadratic, exponential,
 * exact]`; a failed fit is NaN.
 */
export function zne_demo(theta: Float64Array, depol_1q: number, depol_2q: number, shots: number, seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly energy_scan: (a: number, b: number, c: number, d: number) => [number, number];
    readonly exact_energy: (a: number, b: number) => number;
    readonly hardware_theta: () => [number, number];
    readonly trex_demo: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly zne_demo: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly ground_energy: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
