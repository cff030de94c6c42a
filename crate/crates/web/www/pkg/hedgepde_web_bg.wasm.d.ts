/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curves_free: (a: number, b: number) => void;
export const __wbg_get_replication_a0: (a: number) => number;
export const __wbg_get_replication_c0: (a: number) => number;
export const __wbg_get_replication_clamped: (a: number) => number;
export const __wbg_get_replication_eps: (a: number) => number;
export const __wbg_get_replication_theta0: (a: number) => number;
export const __wbg_get_replication_v0: (a: number) => number;
export const __wbg_model_free: (a: number, b: number) => void;
export const __wbg_replication_free: (a: number, b: number) => void;
export const __wbg_set_replication_a0: (a: number, b: number) => void;
export const __wbg_set_replication_c0: (a: number, b: number) => void;
export const __wbg_set_replication_clamped: (a: number, b: number) => void;
export const __wbg_set_replication_eps: (a: number, b: number) => void;
export const __wbg_set_replication_theta0: (a: number, b: number) => void;
export const __wbg_set_replication_v0: (a: number, b: number) => void;
export const a0_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const curves_column: (a: number, b: number) => [number, number];
export const curves_log_column: (a: number, b: number) => [number, number];
export const curves_rhos: (a: number) => [number, number];
export const curves_sigma: (a: number) => [number, number];
export const model_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const model_rho: (a: number) => number;
export const model_standard: () => number;
export const replicate: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const sample_paths: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
