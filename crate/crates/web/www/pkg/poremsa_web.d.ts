/* tslint:disable */
/* eslint-disable */

/**
 * NaCl reservoir activity coefficient and local K diagonal at `count` log-spaced
 * concentrations in [c_min, c_max] mol/l. Returns rows of
 * (c, gamma_inf, K_11, K_22) flattened.
 */
export function activity_curve(c_min: number, c_max: number, count: number): Float64Array;

/**
 * Parses a config and returns the derived-groups report, or the error text.
 */
export function check_config(text: string): string;

/**
 * Coarse NaCl cell solve in an ellipse cell. Returns
 * [K_11, K_12, K_21, K_22, Krel_11, Krel_22, avg_n1, avg_n2, sym_residual, min_eig].
 */
export function solve_cell(porosity: number, aspect: number, rotation_deg: number, pore_size_nm: number, mol_per_l: number, surface_charge: number, msa: boolean): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly activity_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly check_config: (a: number, b: number) => [number, number];
    readonly solve_cell: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
