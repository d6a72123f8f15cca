/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const census_curve: (a: number, b: number) => [number, number, number, number];
export const class_number: (a: number) => [number, number, number];
export const cycle: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const reduce: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
