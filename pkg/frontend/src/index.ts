export { FIGURES, FigureSpec, YColumn, requiredColumns } from "./figures";
export {
  checkColumns,
  loadTable,
  parseTable,
  Row,
  SchemaMismatchError,
  Table,
} from "./schema";
export {
  buildCurves,
  buildOption,
  configCaption,
  Curve,
  renderFigure,
  renderSvg,
} from "./render";
