/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const energy_scan: (a: number, b: number, c: number, d: number) => [number, number];
export const exact_energy: (a: number, b: number) => number;
export const hardware_theta: () => [number, number];
export const trex_demo: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const zne_demo: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const ground_energy: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
