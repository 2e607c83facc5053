#!/usr/bin/env node
import fs from 'fs';
import yargs from 'yargs';

import { EmptyInput, MissingColumn } from './csv';
import { renderBudgetCurve, renderSignals, renderTrackingComparison } from './figures';

export function run(argv: string[]): number {
  const parser = yargs(argv)
    .scriptName('plotkit')
    .usage('$0 <kind> --in <csv...> --out <svg>')
    .command('signals', 'per-agent reference signals plus their average', (y) =>
      y
        .option('in', { type: 'string', array: true, demandOption: true })
        .option('out', { type: 'string', demandOption: true })
    )
    .command('tracking_comparison', 'ensemble error curves with error bars', (y) =>
      y
        .option('in', { type: 'string', array: true, demandOption: true })
        .option('out', { type: 'string', demandOption: true })
        .option('metric', { type: 'string', default: 'tracking_error' })
        .option('labels', { type: 'string', array: true })
        .option('bar-every', { type: 'number', default: 250 })
        .option('linear-y', { type: 'boolean', default: false })
    )
    .command('budget_curve', 'cumulative privacy budget over rounds', (y) =>
      y
        .option('in', { type: 'string', array: true, demandOption: true })
        .option('out', { type: 'string', demandOption: true })
    )
    .demandCommand(1, 'choose a figure kind')
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .help();

  let args: any;
  try {
    args = parser.parseSync();
  } catch (err: any) {
    process.stderr.write(`usage error: ${err.message}\n`);
    return 2;
  }

  const kind = String(args._[0]);
  const inputs: string[] = args.in;
  try {
    let svg: string;
    if (kind === 'signals') {
      if (inputs.length !== 1) throw new Error('signals takes exactly one CSV');
      svg = renderSignals(inputs[0]);
    } else if (kind === 'tracking_comparison') {
      svg = renderTrackingComparison(inputs, {
        metric: args.metric,
        labels: args.labels,
        barEvery: args.barEvery,
        linearY: args.linearY,
      });
    } else if (kind === 'budget_curve') {
      if (inputs.length !== 1) throw new Error('budget_curve takes exactly one CSV');
      svg = renderBudgetCurve(inputs[0]);
    } else {
      process.stderr.write(`unknown figure kind '${kind}'\n`);
      return 2;
    }
    fs.writeFileSync(args.out, svg);
    return 0;
  } catch (err: any) {
    const name = err instanceof EmptyInput || err instanceof MissingColumn ? err.constructor.name : 'error';
    process.stderr.write(`${name}: ${err.message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(run(process.argv.slice(2)));
}
