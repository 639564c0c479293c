/**
 * Server-side SVG rendering of figure specs over parsed CSV tables.
 *
 * Rendering is read-only over its inputs and deterministic: animation is
 * off, no timestamps or random ids enter the output, so rerunning a render
 * overwrites the previous file with identical bytes.
 */

import { existsSync, mkdirSync, readFileSync, writeFileSync } from "fs";
import { dirname, join } from "path";

import * as echarts from "echarts";

import { FigureSpec } from "./figures";
import { checkColumns, loadTable, Table } from "./schema";

const WIDTH = 840;
const HEIGHT = 560;

export interface Curve {
  label: string;
  points: [number, number][];
}

/** Plain numbers near unity, exponent notation for the far decades. */
export function formatLogTick(value: number): string {
  const magnitude = Math.abs(value);
  if (value === 0 || (magnitude >= 0.01 && magnitude < 10000)) {
    return String(value);
  }
  return value.toExponential(0).replace("e+", "e");
}

/** One curve per y-column per distinct groupBy combination, in first-seen order. */
export function buildCurves(table: Table, spec: FigureSpec): Curve[] {
  const groups: string[] = [];
  const rowsByGroup = new Map<string, Table["rows"]>();
  for (const row of table.rows) {
    const key = spec.groupBy.map((c) => String(row[c])).join("|");
    if (!rowsByGroup.has(key)) {
      rowsByGroup.set(key, []);
      groups.push(key);
    }
    rowsByGroup.get(key)!.push(row);
  }

  const curves: Curve[] = [];
  for (const key of groups) {
    const rows = rowsByGroup.get(key)!;
    const parts = key.split("|");
    // bare value for categorical groups ("ARAP"), col=value for numeric ones
    const groupLabel = spec.groupBy
      .map((c, i) => (isNaN(Number(parts[i])) ? parts[i] : `${c}=${parts[i]}`))
      .join(", ");
    for (const y of spec.yColumns) {
      const points = rows
        .map((r): [unknown, unknown] => [r[spec.xColumn], r[y.column]])
        .filter(
          (p): p is [number, number] =>
            typeof p[0] === "number" && typeof p[1] === "number" && isFinite(p[1])
        )
        .sort((a, b) => a[0] - b[0]);
      const label =
        spec.yColumns.length > 1 ? `${y.label}, ${groupLabel}` : groupLabel;
      curves.push({ label, points });
    }
  }
  return curves;
}

export function buildOption(
  spec: FigureSpec,
  curves: Curve[],
  caption?: string
): echarts.EChartsOption {
  return {
    animation: false,
    backgroundColor: "#ffffff",
    title: {
      text: spec.title,
      subtext: caption,
      left: "center",
    },
    legend: { bottom: 0, data: curves.map((c) => c.label) },
    grid: { left: 70, right: 30, top: 70, bottom: 70 },
    xAxis: {
      type: "value",
      name: spec.xLabel,
      nameLocation: "middle",
      nameGap: 28,
    },
    yAxis: spec.logY
      ? {
          type: "log",
          name: spec.yLabel,
          nameLocation: "middle",
          nameGap: 50,
          axisLabel: { formatter: formatLogTick },
        }
      : {
          type: "value",
          name: spec.yLabel,
          nameLocation: "middle",
          nameGap: 50,
        },
    series: curves.map((c) => ({
      type: "line",
      name: c.label,
      data: c.points,
      showSymbol: c.points.length <= 40,
      symbolSize: 5,
    })),
  };
}

export function renderSvg(
  table: Table,
  spec: FigureSpec,
  caption?: string
): string {
  checkColumns(table, spec);
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: WIDTH,
    height: HEIGHT,
  });
  chart.setOption(buildOption(spec, buildCurves(table, spec), caption));
  let svg = chart.renderToSVGString();
  chart.dispose();
  // wide log axes make echarts invent a tick at zero, emitted as grid lines
  // and labels with Infinity coordinates; that is invalid SVG, so drop those
  // elements (browsers would not draw them anyway)
  svg = svg.replace(/<(path|text)\b[^>]*(?:Infinity|NaN)[^>]*>[^<]*<\/\1>\n?/g, "");
  // class names and clip-path ids carry process-global counters (zr0-cls-0,
  // zr1-cls-4, zr1-c0, ...); renumber them by first appearance so identical
  // inputs give identical bytes no matter how many charts this process
  // rendered before
  const classes = new Map<string, string>();
  const clips = new Map<string, string>();
  return svg.replace(/zr\d+-(cls-\d+|c\d+)/g, (token, suffix: string) => {
    const [pool, prefix] = suffix.startsWith("cls-")
      ? [classes, "zr-cls-"]
      : [clips, "zr-c"];
    if (!pool.has(token)) {
      pool.set(token, `${prefix}${pool.size}`);
    }
    return pool.get(token)!;
  });
}

/** The run manifest sits next to the CSV; its config hash goes into the caption. */
export function configCaption(csvPath: string): string | undefined {
  const manifestPath = join(dirname(csvPath), "manifest.json");
  if (!existsSync(manifestPath)) {
    return undefined;
  }
  const manifest = JSON.parse(readFileSync(manifestPath, "utf8"));
  return typeof manifest.config_hash === "string"
    ? `config ${manifest.config_hash}`
    : undefined;
}

/** Render one figure from a CSV file into outDir; returns the image path. */
export function renderFigure(
  csvPath: string,
  spec: FigureSpec,
  outDir: string
): string {
  const svg = renderSvg(loadTable(csvPath), spec, configCaption(csvPath));
  mkdirSync(outDir, { recursive: true });
  const outPath = join(outDir, spec.outputFile);
  writeFileSync(outPath, svg);
  return outPath;
}
