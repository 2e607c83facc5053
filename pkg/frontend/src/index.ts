export { EmptyInput, MissingColumn, readCsv, column } from './csv';
export { renderSignals, renderTrackingComparison, renderBudgetCurve } from './figures';
export { renderChart, decimate, linearTicks, logTicks } from './svg';
export { run } from './cli';
