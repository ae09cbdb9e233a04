/** Typed failures surfaced by the figure renderers. */

export class FigureError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "FigureError";
  }
}

/** A renderer asked for a CSV column that the file does not provide. */
export class MissingColumnError extends FigureError {
  constructor(public readonly file: string, public readonly column: string,
              available: string[]) {
    super(`${file}: missing column '${column}' (has: ${available.join(", ")})`);
    this.name = "MissingColumn";
  }
}

/** The data does not form the complete grid (or series) a figure needs. */
export class IncompleteGridError extends FigureError {
  constructor(message: string) {
    super(message);
    this.name = "IncompleteGrid";
  }
}
