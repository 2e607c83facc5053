import { execSync } from 'child_process';
import fs from 'fs';
import os from 'os';
import path from 'path';
import { beforeAll, describe, expect, it } from 'vitest';

import { EmptyInput, MissingColumn } from '../src/csv';
import { renderSignals, renderTrackingComparison } from '../src/figures';
import { run } from '../src/cli';
import { decimate, linearTicks, logTicks } from '../src/svg';

const REPO_ROOT = path.resolve(__dirname, '..', '..');
const CONFIG = path.join(REPO_ROOT, 'configs', 'quick.yaml');

let harnessDir: string;
let outDir: string;

const countMatches = (s: string, re: RegExp) => (s.match(re) ?? []).length;

beforeAll(() => {
  harnessDir = fs.mkdtempSync(path.join(os.tmpdir(), 'plotkit-harness-'));
  outDir = fs.mkdtempSync(path.join(os.tmpdir(), 'plotkit-out-'));
  execSync(`python3 -m dpconsensus run ${CONFIG} --out ${harnessDir}`, {
    cwd: REPO_ROOT,
    stdio: 'pipe',
  });
}, 240_000);

const ensembleCsvs = () =>
  ['robust', 'conventional', 'geometric'].map((a) => path.join(harnessDir, a, 'ensemble.csv'));

describe('signals figure', () => {
  it('renders one curve per agent plus the dashed average', () => {
    const svg = renderSignals(path.join(harnessDir, 'signals.csv'));
    expect(countMatches(svg, /class="curve"/g)).toBe(6);
    expect(countMatches(svg, /stroke-dasharray/g)).toBeGreaterThanOrEqual(1);
    expect(svg.startsWith('<svg')).toBe(true);
  });

  it('is deterministic across two CLI invocations', () => {
    const a = path.join(outDir, 'signals-a.svg');
    const b = path.join(outDir, 'signals-b.svg');
    expect(run(['signals', '--in', path.join(harnessDir, 'signals.csv'), '--out', a])).toBe(0);
    expect(run(['signals', '--in', path.join(harnessDir, 'signals.csv'), '--out', b])).toBe(0);
    expect(fs.readFileSync(a)).toEqual(fs.readFileSync(b));
  });
});

describe('tracking comparison figure', () => {
  it('renders three labelled mean curves with error bars', () => {
    const svg = renderTrackingComparison(ensembleCsvs());
    expect(countMatches(svg, /class="curve"/g)).toBe(3);
    expect(countMatches(svg, /class="errorbar"/g)).toBeGreaterThan(3);
    for (const label of ['robust', 'conventional', 'geometric']) {
      expect(svg).toContain(`>${label}</text>`);
    }
  });

  it('is deterministic across two CLI invocations', () => {
    const a = path.join(outDir, 'cmp-a.svg');
    const b = path.join(outDir, 'cmp-b.svg');
    const argv = ['tracking_comparison', '--in', ...ensembleCsvs(), '--out'];
    expect(run([...argv, a])).toBe(0);
    expect(run([...argv, b])).toBe(0);
    expect(fs.readFileSync(a)).toEqual(fs.readFileSync(b));
  });

  it('supports the spread metric and linear axis', () => {
    const svg = renderTrackingComparison(ensembleCsvs(), {
      metric: 'consensus_error',
      linearY: true,
    });
    expect(svg).toContain('consensus error');
  });

  it('fails loudly on a missing metric column', () => {
    expect(() =>
      renderTrackingComparison(ensembleCsvs(), { metric: 'no_such_metric' })
    ).toThrow(MissingColumn);
  });
});

describe('budget curve figure', () => {
  it('renders from the ledger CSV', () => {
    const out = path.join(outDir, 'budget.svg');
    expect(run(['budget_curve', '--in', path.join(harnessDir, 'ledger.csv'), '--out', out])).toBe(0);
    const svg = fs.readFileSync(out, 'utf-8');
    expect(countMatches(svg, /class="curve"/g)).toBe(1);
  });
});

describe('error handling', () => {
  it('rejects an empty CSV with a nonzero exit', () => {
    const empty = path.join(outDir, 'empty.csv');
    fs.writeFileSync(empty, 'k,agent_1,average\n');
    expect(() => renderSignals(empty)).toThrow(EmptyInput);
    const code = run(['signals', '--in', empty, '--out', path.join(outDir, 'nope.svg')]);
    expect(code).toBe(1);
    expect(fs.existsSync(path.join(outDir, 'nope.svg'))).toBe(false);
  });

  it('usage errors exit with 2', () => {
    expect(run(['unknown_kind', '--in', 'x.csv', '--out', 'y.svg'])).toBe(2);
    expect(run([])).toBe(2);
  });
});

describe('chart helpers', () => {
  it('decimate keeps endpoints and respects the budget', () => {
    const values = Array.from({ length: 5001 }, (_, i) => i);
    const out = decimate(values, 1000);
    expect(out.length).toBeLessThanOrEqual(1001);
    expect(out[0]).toBe(0);
    expect(out[out.length - 1]).toBe(5000);
  });

  it('tick generators cover the range with round numbers', () => {
    const ticks = linearTicks(0, 5000);
    expect(ticks[0]).toBeGreaterThanOrEqual(0);
    expect(ticks[ticks.length - 1]).toBeLessThanOrEqual(5000);
    expect(logTicks(0.05, 80)).toEqual([0.01, 0.1, 1, 10]);
  });
});
