export { column, hasColumn, readTable, requireRows } from "./csv.js";
export type { Table } from "./csv.js";
export { FigureError, IncompleteGridError, MissingColumnError } from "./errors.js";
export { FIGURE_KINDS, renderFigure, renderToRaster } from "./figure.js";
export type { FigureKind, FigureSpec } from "./figure.js";
export { Raster } from "./raster.js";
export { buildSpec, run } from "./cli.js";
