export { PlotkitError, parseCsv, requireColumns, unknownColumns } from "./csv.js";
export { rawToken, scalarLeaves } from "./jsontext.js";
export { FIGURE_KINDS, buildFigure } from "./figures.js";
export type { Figure, FigureKind } from "./figures.js";
export { renderSummary } from "./html.js";
export { main } from "./cli.js";
