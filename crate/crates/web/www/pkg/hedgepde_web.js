/* @ts-self-types="./hedgepde_web.d.ts" */

export class Curves {
    static __wrap(ptr) {
        const obj = Object.create(Curves.prototype);
        obj.__wbg_ptr = ptr;
        CurvesFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        CurvesFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_curves_free(ptr, 0);
    }
    /**
     * `a(0, σ)` for the `i`-th correlation, empty if that solve failed.
     * @param {number} i
     * @returns {Float64Array}
     */
    column(i) {
        const ret = wasm.curves_column(this.__wbg_ptr, i);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * `ln a(0, σ)`, finite even where `a` underflows.
     * @param {number} i
     * @returns {Float64Array}
     */
    log_column(i) {
        const ret = wasm.curves_log_column(this.__wbg_ptr, i);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    rhos() {
        const ret = wasm.curves_rhos(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    sigma() {
        const ret = wasm.curves_sigma(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) Curves.prototype[Symbol.dispose] = Curves.prototype.free;

export class Model {
    static __wrap(ptr) {
        const obj = Object.create(Model.prototype);
        obj.__wbg_ptr = ptr;
        ModelFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        ModelFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_model_free(ptr, 0);
    }
    /**
     * @param {number} k
     * @param {number} rho
     * @param {number} delta
     * @param {number} sigma1
     * @param {number} mu
     * @param {number} sigma0
     * @param {number} maturity
     */
    constructor(k, rho, delta, sigma1, mu, sigma0, maturity) {
        const ret = wasm.model_new(k, rho, delta, sigma1, mu, sigma0, maturity);
        if (ret[2]) {
            throw takeFromExternrefTable0(ret[1]);
        }
        this.__wbg_ptr = ret[0];
        ModelFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
    /**
     * @returns {number}
     */
    get rho() {
        const ret = wasm.model_rho(this.__wbg_ptr);
        return ret;
    }
    /**
     * The default parameter set.
     * @returns {Model}
     */
    static standard() {
        const ret = wasm.model_standard();
        return Model.__wrap(ret);
    }
}
if (Symbol.dispose) Model.prototype[Symbol.dispose] = Model.prototype.free;

export class Replication {
    static __wrap(ptr) {
        const obj = Object.create(Replication.prototype);
        obj.__wbg_ptr = ptr;
        ReplicationFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        ReplicationFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_replication_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get a0() {
        const ret = wasm.__wbg_get_replication_a0(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get c0() {
        const ret = wasm.__wbg_get_replication_c0(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {boolean}
     */
    get clamped() {
        const ret = wasm.__wbg_get_replication_clamped(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    get eps() {
        const ret = wasm.__wbg_get_replication_eps(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get theta0() {
        const ret = wasm.__wbg_get_replication_theta0(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get v0() {
        const ret = wasm.__wbg_get_replication_v0(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set a0(arg0) {
        wasm.__wbg_set_replication_a0(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set c0(arg0) {
        wasm.__wbg_set_replication_c0(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} arg0
     */
    set clamped(arg0) {
        wasm.__wbg_set_replication_clamped(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set eps(arg0) {
        wasm.__wbg_set_replication_eps(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set theta0(arg0) {
        wasm.__wbg_set_replication_theta0(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set v0(arg0) {
        wasm.__wbg_set_replication_v0(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) Replication.prototype[Symbol.dispose] = Replication.prototype.free;

/**
 * `a(0, ·)` on `[0, x_max]` for each correlation in `rhos`.
 * @param {Model} model
 * @param {Float64Array} rhos
 * @param {number} x_max
 * @param {number} n_x
 * @param {number} n_steps
 * @returns {Curves}
 */
export function a0_curves(model, rhos, x_max, n_x, n_steps) {
    _assertClass(model, Model);
    const ptr0 = passArrayF64ToWasm0(rhos, wasm.__wbindgen_malloc);
    const len0 = WASM_VECTOR_LEN;
    const ret = wasm.a0_curves(model.__wbg_ptr, ptr0, len0, x_max, n_x, n_steps);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Curves.__wrap(ret[0]);
}

/**
 * Optimal initial wealth, replication error and hedge ratio for a call
 * (`call = true`) or put struck at `strike`, observed at `(sigma, price)`.
 * @param {Model} model
 * @param {boolean} call
 * @param {number} strike
 * @param {number} sigma
 * @param {number} price
 * @param {number} nodes
 * @param {number} n_steps
 * @returns {Replication}
 */
export function replicate(model, call, strike, sigma, price, nodes, n_steps) {
    _assertClass(model, Model);
    const ret = wasm.replicate(model.__wbg_ptr, call, strike, sigma, price, nodes, n_steps);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Replication.__wrap(ret[0]);
}

/**
 * `n_paths` paths of `n_steps` steps from `(sigma, price)`, flattened as
 * `[σ₀, P₀, σ₁, P₁, …]` per path, paths back to back.
 * @param {Model} model
 * @param {number} n_paths
 * @param {number} n_steps
 * @param {number} seed
 * @param {number} sigma
 * @param {number} price
 * @returns {Float64Array}
 */
export function sample_paths(model, n_paths, n_steps, seed, sigma, price) {
    _assertClass(model, Model);
    const ret = wasm.sample_paths(model.__wbg_ptr, n_paths, n_steps, seed, sigma, price);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./hedgepde_web_bg.js": import0,
    };
}

const CurvesFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_curves_free(ptr, 1));
const ModelFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_model_free(ptr, 1));
const ReplicationFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_replication_free(ptr, 1));

function _assertClass(instance, klass) {
    if (!(instance instanceof klass)) {
        throw new Error(`expected instance of ${klass.name}`);
    }
}

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passArrayF64ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 8, 8) >>> 0;
    getFloat64ArrayMemory0().set(arg, ptr / 8);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('hedgepde_web_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
