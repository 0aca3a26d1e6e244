/** Median-split subgroup comparison at fixed homophily.
 *
 * Graphs are split into low/high assortativity strata at the median; within
 * each stratum every secondary measure splits the graphs at its own median,
 * and the high-vs-low percent difference of each metric is tested with a
 * two-sided Mann-Whitney U.
 */

import { Corpus, CorpusRow, filterModel, numeric, requireColumns } from "./csv.js";
import { mannWhitney } from "./mannwhitney.js";
import { mean, median } from "./stats.js";

export const DEFAULT_SECONDARY_MEASURES = ["heterogeneity", "info_unfairness", "power_exp"];
export const SUBGROUP_METRICS = ["hit10", "eo10", "sp10"] as const;

export interface SubgroupCell {
  measure: string;
  stratum: "low" | "high";
  metric: string;
  percentDiff: number | null;  // 100 * (mean_high - mean_low) / |mean_low|
  pValue: number | null;
  significant: boolean;
  available: boolean;
  nLow: number;
  nHigh: number;
}

export interface SubgroupTable {
  modelId: string;
  cells: SubgroupCell[];
  minGraphs: number;
}

interface GraphEntry {
  values: Record<string, number>;
}

/** Collapse corpus rows to one entry per graph (bias values repeat per split). */
function perGraph(rows: CorpusRow[], columns: string[]): GraphEntry[] {
  const byGraph = new Map<string, CorpusRow[]>();
  for (const row of rows) {
    const key = `${row["alpha"]}|${row["beta"]}|${row["repeat"]}|${row["graph_seed"]}`;
    const bucket = byGraph.get(key);
    if (bucket) bucket.push(row);
    else byGraph.set(key, [row]);
  }
  const out: GraphEntry[] = [];
  for (const bucket of byGraph.values()) {
    const values: Record<string, number> = {};
    let ok = true;
    for (const col of columns) {
      const vals = bucket.map((r) => numeric(r, col)).filter((v): v is number => v !== null);
      if (vals.length === 0) {
        ok = false;
        break;
      }
      values[col] = mean(vals);
    }
    if (ok) out.push({ values });
  }
  return out;
}

export function rq3Subgroups(corpus: Corpus, modelId: string,
                             secondaryMeasures = DEFAULT_SECONDARY_MEASURES,
                             minGraphs = 10, alphaLevel = 0.05): SubgroupTable {
  requireColumns(corpus, ["assortativity", "model", ...SUBGROUP_METRICS]);
  const rows = filterModel(corpus, modelId);
  const columns = ["assortativity", ...secondaryMeasures, ...SUBGROUP_METRICS];
  const graphs = perGraph(rows, columns);
  const assortMedian = median(graphs.map((g) => g.values["assortativity"]));
  const strata: Array<["low" | "high", GraphEntry[]]> = [
    ["low", graphs.filter((g) => g.values["assortativity"] <= assortMedian)],
    ["high", graphs.filter((g) => g.values["assortativity"] > assortMedian)],
  ];

  const cells: SubgroupCell[] = [];
  for (const [stratum, members] of strata) {
    for (const measure of secondaryMeasures) {
      const measMedian = members.length
        ? median(members.map((g) => g.values[measure]))
        : NaN;
      const low = members.filter((g) => g.values[measure] <= measMedian);
      const high = members.filter((g) => g.values[measure] > measMedian);
      for (const metric of SUBGROUP_METRICS) {
        const cell: SubgroupCell = {
          measure, stratum, metric, percentDiff: null, pValue: null,
          significant: false, available: false,
          nLow: low.length, nHigh: high.length,
        };
        if (low.length >= minGraphs && high.length >= minGraphs) {
          const lowVals = low.map((g) => g.values[metric]);
          const highVals = high.map((g) => g.values[metric]);
          const meanLow = mean(lowVals);
          if (meanLow !== 0) {
            cell.percentDiff = (100 * (mean(highVals) - meanLow)) / Math.abs(meanLow);
            const test = mannWhitney(highVals, lowVals);
            cell.pValue = test.p;
            cell.significant = test.p < alphaLevel;
            cell.available = true;
          }
        }
        cells.push(cell);
      }
    }
  }
  return { modelId, cells, minGraphs };
}

export function subgroupTableToCsv(table: SubgroupTable): string {
  const lines = ["measure,stratum,metric,percent_diff,p_value,significant,n_low,n_high"];
  for (const c of table.cells) {
    lines.push([
      c.measure, c.stratum, c.metric,
      c.percentDiff === null ? "" : c.percentDiff.toFixed(4),
      c.pValue === null ? "" : c.pValue.toExponential(4),
      c.available ? String(c.significant) : "unavailable",
      c.nLow, c.nHigh,
    ].join(","));
  }
  return lines.join("\n") + "\n";
}
