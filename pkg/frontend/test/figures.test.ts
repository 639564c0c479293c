import { mkdtempSync, readFileSync, existsSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { FIGURES, requiredColumns } from "../src/figures";
import {
  buildCurves,
  buildOption,
  formatLogTick,
  renderFigure,
  renderSvg,
} from "../src/render";
import { checkColumns, loadTable, parseTable, SchemaMismatchError } from "../src/schema";

const FIG4_CSV = join(__dirname, "fixtures", "fig4", "fig4.csv");
const FIG5_CSV = join(__dirname, "fixtures", "fig5", "fig5.csv");

describe("schema", () => {
  it("parses headers and types numbers", () => {
    const t = parseTable("delta,D_x,ratio_best,ratio_avg\n0.5,20,1e-3,2e-4\n");
    expect(t.columns).toEqual(["delta", "D_x", "ratio_best", "ratio_avg"]);
    expect(t.rows[0].ratio_best).toBeCloseTo(1e-3);
  });

  it("accepts the real fig4 output", () => {
    const t = loadTable(FIG4_CSV);
    expect(() => checkColumns(t, FIGURES.fig4)).not.toThrow();
  });

  it("names the missing column on a truncated CSV", () => {
    const t = parseTable("delta,D_x,ratio_best\n0.5,20,1e-3\n");
    expect(() => checkColumns(t, FIGURES.fig4)).toThrow(SchemaMismatchError);
    expect(() => checkColumns(t, FIGURES.fig4)).toThrow(/ratio_avg/);
  });

  it("rejects an empty CSV", () => {
    expect(() => checkColumns(parseTable(""), FIGURES.fig5)).toThrow(
      /iteration/
    );
  });

  it("lists every referenced column as required", () => {
    expect(requiredColumns(FIGURES.fig7)).toEqual([
      "D_x",
      "wsr_mean",
      "protocol",
      "K",
    ]);
  });
});

describe("curves", () => {
  it("fig4 yields two curves per span value", () => {
    const t = loadTable(FIG4_CSV);
    const curves = buildCurves(t, FIGURES.fig4);
    const spans = new Set(t.rows.map((r) => r.D_x));
    expect(curves.length).toBe(2 * spans.size);
    expect(curves.map((c) => c.label)).toContain("best case, D_x=20");
  });

  it("fig4 best case stays above the average everywhere", () => {
    const curves = buildCurves(loadTable(FIG4_CSV), FIGURES.fig4);
    const span = (label: string) => label.split(", ")[1];
    const best = new Map(
      curves.filter((c) => c.label.startsWith("best")).map((c) => [span(c.label), c])
    );
    for (const avg of curves.filter((c) => c.label.startsWith("average"))) {
      const twin = best.get(span(avg.label))!;
      avg.points.forEach(([, y], i) => expect(twin.points[i][1]).toBeGreaterThan(y));
    }
  });

  it("fig5 yields one non-decreasing trace per protocol", () => {
    const t = loadTable(FIG5_CSV);
    const curves = buildCurves(t, FIGURES.fig5);
    expect(curves.map((c) => c.label).sort()).toEqual([
      "ARAP",
      "ARFP",
      "FRAP",
      "FRFP",
    ]);
    for (const c of curves) {
      expect(c.points.length).toBeGreaterThan(0);
      for (let i = 1; i < c.points.length; i++) {
        expect(c.points[i][1]).toBeGreaterThanOrEqual(c.points[i - 1][1] - 1e-12);
      }
    }
  });

  it("drops empty cells instead of drawing zeros", () => {
    const t = parseTable("iteration,protocol,wsr\n0,FRFP,\n1,FRFP,13.4\n");
    const curves = buildCurves(t, FIGURES.fig5);
    expect(curves[0].points).toEqual([[1, 13.4]]);
  });
});

describe("options", () => {
  it("fig4 uses a logarithmic y-axis, fig5 a linear one", () => {
    const fig4 = buildOption(FIGURES.fig4, []);
    const fig5 = buildOption(FIGURES.fig5, []);
    expect((fig4.yAxis as { type: string }).type).toBe("log");
    expect((fig5.yAxis as { type: string }).type).toBe("value");
  });

  it("legend carries one entry per curve", () => {
    const curves = buildCurves(loadTable(FIG4_CSV), FIGURES.fig4);
    const option = buildOption(FIGURES.fig4, curves);
    expect((option.legend as { data: string[] }).data.length).toBe(curves.length);
    expect((option.series as unknown[]).length).toBe(curves.length);
  });
});

describe("rendering", () => {
  it("writes an SVG with the config hash caption", () => {
    const out = mkdtempSync(join(tmpdir(), "figs-"));
    const path = renderFigure(FIG4_CSV, FIGURES.fig4, out);
    const svg = readFileSync(path, "utf8");
    const manifest = JSON.parse(
      readFileSync(join(__dirname, "fixtures", "fig4", "manifest.json"), "utf8")
    );
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain(`config ${manifest.config_hash}`);
  });

  it("renders fig5 with four series", () => {
    const svg = renderSvg(loadTable(FIG5_CSV), FIGURES.fig5);
    expect(svg).toContain("FRFP");
    expect(svg).toContain("ARAP");
  });

  it("rerendering produces identical bytes", () => {
    const out = mkdtempSync(join(tmpdir(), "figs-"));
    const first = readFileSync(renderFigure(FIG4_CSV, FIGURES.fig4, out), "utf8");
    const second = readFileSync(renderFigure(FIG4_CSV, FIGURES.fig4, out), "utf8");
    expect(second).toBe(first);
  });

  it("keeps log-axis output valid and its ticks readable", () => {
    const svg = renderSvg(loadTable(FIG4_CSV), FIGURES.fig4);
    expect(svg).not.toContain("Infinity");
    expect(svg).not.toContain("NaN");
    expect(formatLogTick(1e-10)).toBe("1e-10");
    expect(formatLogTick(10000000000)).toBe("1e10");
    expect(formatLogTick(1)).toBe("1");
    expect(formatLogTick(0.5)).toBe("0.5");
  });

  it("emits no image when the schema does not match", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const csv = join(dir, "bad.csv");
    writeFileSync(csv, "delta,D_x,ratio_best\n0.5,20,1e-3\n");
    const out = join(dir, "out");
    expect(() => renderFigure(csv, FIGURES.fig4, out)).toThrow(/ratio_avg/);
    expect(existsSync(join(out, "fig4.svg"))).toBe(false);
  });
});
