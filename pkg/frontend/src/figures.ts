/**
 * Figure registry: how each experiment CSV maps onto a chart.
 *
 * A figure draws one curve per y-column per distinct value combination of
 * the groupBy columns, so fig4 (two ratio columns, grouped by span length)
 * yields two curves per span value while fig7 (one mean column, grouped by
 * protocol and user count) yields one curve per protocol and K.
 */

export interface YColumn {
  column: string;
  label: string;
}

export interface FigureSpec {
  name: string;
  title: string;
  xColumn: string;
  xLabel: string;
  yLabel: string;
  yColumns: YColumn[];
  groupBy: string[];
  logY: boolean;
  outputFile: string;
}

export const FIGURES: Record<string, FigureSpec> = {
  fig4: {
    name: "fig4",
    title: "Radiated-to-wired gain ratio vs radiation split",
    xColumn: "delta",
    xLabel: "radiation split delta",
    yLabel: "gain ratio",
    yColumns: [
      { column: "ratio_best", label: "best case" },
      { column: "ratio_avg", label: "average" },
    ],
    groupBy: ["D_x"],
    logY: true,
    outputFile: "fig4.svg",
  },
  fig5: {
    name: "fig5",
    title: "Optimizer progress per sweep",
    xColumn: "iteration",
    xLabel: "sweep",
    yLabel: "weighted sum rate (bit/s/Hz)",
    yColumns: [{ column: "wsr", label: "WSR" }],
    groupBy: ["protocol"],
    logY: false,
    outputFile: "fig5.svg",
  },
  fig6: {
    name: "fig6",
    title: "Two-user sum rate vs span length",
    xColumn: "D_x",
    xLabel: "span length (m)",
    yLabel: "sum rate (bit/s/Hz)",
    yColumns: [{ column: "sum_rate_mean", label: "sum rate" }],
    groupBy: ["scheme"],
    logY: false,
    outputFile: "fig6.svg",
  },
  fig7: {
    name: "fig7",
    title: "Weighted sum rate vs span length",
    xColumn: "D_x",
    xLabel: "span length (m)",
    yLabel: "weighted sum rate (bit/s/Hz)",
    yColumns: [{ column: "wsr_mean", label: "WSR" }],
    groupBy: ["protocol", "K"],
    logY: false,
    outputFile: "fig7.svg",
  },
  fig8: {
    name: "fig8",
    title: "Two-user sum rate vs transmit power",
    xColumn: "P_dBm",
    xLabel: "transmit power (dBm)",
    yLabel: "sum rate (bit/s/Hz)",
    yColumns: [{ column: "sum_rate_mean", label: "sum rate" }],
    groupBy: ["scheme"],
    logY: false,
    outputFile: "fig8.svg",
  },
  fig9: {
    name: "fig9",
    title: "Weighted sum rate vs transmit power",
    xColumn: "P_dBm",
    xLabel: "transmit power (dBm)",
    yLabel: "weighted sum rate (bit/s/Hz)",
    yColumns: [{ column: "wsr_mean", label: "WSR" }],
    groupBy: ["protocol", "K"],
    logY: false,
    outputFile: "fig9.svg",
  },
};

export function requiredColumns(spec: FigureSpec): string[] {
  return [spec.xColumn, ...spec.yColumns.map((y) => y.column), ...spec.groupBy];
}
