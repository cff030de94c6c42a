/* tslint:disable */
/* eslint-disable */

export class Curves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `a(0, σ)` for the `i`-th correlation, empty if that solve failed.
     */
    column(i: number): Float64Array;
    /**
     * `ln a(0, σ)`, finite even where `a` underflows.
     */
    log_column(i: number): Float64Array;
    rhos(): Float64Array;
    sigma(): Float64Array;
}

export class Model {
    free(): void;
    [Symbol.dispose](): void;
    constructor(k: number, rho: number, delta: number, sigma1: number, mu: number, sigma0: number, maturity: number);
    /**
     * The default parameter set.
     */
    static standard(): Model;
    readonly rho: number;
}

export class Replication {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    a0: number;
    c0: number;
    clamped: boolean;
    eps: number;
    theta0: number;
    v0: number;
}

/**
 * `a(0, ·)` on `[0, x_max]` for each correlation in `rhos`.
 */
export function a0_curves(model: Model, rhos: Float64Array, x_max: number, n_x: number, n_steps: number): Curves;

/**
 * Optimal initial wealth, replication error and hedge ratio for a call
 * (`call = true`) or put struck at `strike`, observed at `(sigma, price)`.
 */
export function replicate(model: Model, call: boolean, strike: number, sigma: number, price: number, nodes: number, n_steps: number): Replication;

/**
 * `n_paths` paths of `n_steps` steps from `(sigma, price)`, flattened as
 * `[σ₀, P₀, σ₁, P₁, …]` per path, paths back to back.
 */
export function sample_paths(model: Model, n_paths: number, n_steps: number, seed: number, sigma: number, price: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curves_free: (a: number, b: number) => void;
    readonly __wbg_get_replication_a0: (a: number) => number;
    readonly __wbg_get_replication_c0: (a: number) => number;
    readonly __wbg_get_replication_clamped: (a: number) => number;
    readonly __wbg_get_replication_eps: (a: number) => number;
    readonly __wbg_get_replication_theta0: (a: number) => number;
    readonly __wbg_get_replication_v0: (a: number) => number;
    readonly __wbg_model_free: (a: number, b: number) => void;
    readonly __wbg_replication_free: (a: number, b: number) => void;
    readonly __wbg_set_replication_a0: (a: number, b: number) => void;
    readonly __wbg_set_replication_c0: (a: number, b: number) => void;
    readonly __wbg_set_replication_clamped: (a: number, b: number) => void;
    readonly __wbg_set_replication_eps: (a: number, b: number) => void;
    readonly __wbg_set_replication_theta0: (a: number, b: number) => void;
    readonly __wbg_set_replication_v0: (a: number, b: number) => void;
    readonly a0_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly curves_column: (a: number, b: number) => [number, number];
    readonly curves_log_column: (a: number, b: number) => [number, number];
    readonly curves_rhos: (a: number) => [number, number];
    readonly curves_sigma: (a: number) => [number, number];
    readonly model_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly model_rho: (a: number) => number;
    readonly model_standard: () => number;
    readonly replicate: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly sample_paths: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
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
