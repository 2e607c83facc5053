import path from 'path';

import { column, readCsv, MissingColumn } from './csv';
import { ChartSpec, PALETTE, Series, decimate, renderChart } from './svg';

export interface ComparisonOptions {
  metric?: string;
  labels?: string[];
  barEvery?: number;
  linearY?: boolean;
}

const MAX_POINTS = 1000;

function thin(x: number[], y: number[], extra?: number[]) {
  return {
    x: decimate(x, MAX_POINTS),
    y: decimate(y, MAX_POINTS),
    extra: extra ? decimate(extra, MAX_POINTS) : undefined,
  };
}

/** Per-agent reference signals plus their dashed average. */
export function renderSignals(csvPath: string): string {
  const table = readCsv(csvPath);
  const k = column(table, 'k');
  const agents = table.columns.filter((c) => c.startsWith('agent_'));
  if (agents.length === 0) {
    throw new MissingColumn(`${csvPath} has no agent_* columns`);
  }
  const series: Series[] = agents.map((name, i) => {
    const t = thin(k, column(table, name));
    return { label: name.replace('_', ' '), x: t.x, y: t.y, color: PALETTE[i % PALETTE.length] };
  });
  const avg = thin(k, column(table, 'average'));
  series.push({ label: 'average', x: avg.x, y: avg.y, color: '#000000', dashed: true });
  const spec: ChartSpec = {
    title: 'Reference signals and their average',
    xLabel: 'round',
    yLabel: 'signal value',
    logY: false,
    series,
  };
  return renderChart(spec);
}

/** Ensemble-mean error curves with error bars, one per algorithm. */
export function renderTrackingComparison(csvPaths: string[], opts: ComparisonOptions = {}): string {
  const metric = opts.metric ?? 'tracking_error';
  const barEvery = opts.barEvery ?? 250;
  const series: Series[] = csvPaths.map((p, i) => {
    const table = readCsv(p);
    const k = column(table, 'k');
    const mean = column(table, `${metric}_mean`);
    const std = column(table, `${metric}_var`).map(Math.sqrt);
    const t = thin(k, mean, std);
    const stride = Math.max(1, Math.round(barEvery / Math.ceil(k.length / t.x.length)));
    const label = opts.labels?.[i] ?? path.basename(path.dirname(path.resolve(p)));
    return {
      label,
      x: t.x,
      y: t.y,
      color: PALETTE[i % PALETTE.length],
      bars: t.extra,
      barEvery: stride,
    };
  });
  const spec: ChartSpec = {
    title: `Ensemble mean of ${metric.replace(/_/g, ' ')} (bars: +-1 std)`,
    xLabel: 'round',
    yLabel: metric.replace(/_/g, ' '),
    logY: !opts.linearY,
    series,
  };
  return renderChart(spec);
}

/** Cumulative privacy budget over rounds, from the accountant's ledger. */
export function renderBudgetCurve(csvPath: string): string {
  const table = readCsv(csvPath);
  const k = column(table, 'k');
  const eps = column(table, 'epsilon_cum');
  const t = thin(k, eps);
  const spec: ChartSpec = {
    title: 'Cumulative privacy budget',
    xLabel: 'round',
    yLabel: 'budget bound',
    logY: false,
    series: [{ label: 'epsilon', x: t.x, y: t.y, color: PALETTE[1] }],
  };
  return renderChart(spec);
}
