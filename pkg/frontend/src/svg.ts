/**
 * Dependency-free SVG renderers for the three report figures.
 *
 * Layout is fixed-size (640x400) with a simple left/bottom axis frame; the
 * exact plotted numbers always travel in the values sidecar, never only in
 * the image.
 */

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { top: 40, right: 24, bottom: 56, left: 64 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;
const COLORS = ["#4878d0", "#ee854a", "#6acc64", "#d65f5f", "#956cb4", "#8c613c"];

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function frame(title: string, body: string[], yLabel: string, xLabel: string): string {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">${esc(title)}</text>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${MARGIN.top + PLOT_H}" stroke="#333"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top + PLOT_H}" x2="${MARGIN.left + PLOT_W}" y2="${MARGIN.top + PLOT_H}" stroke="#333"/>`,
    `<text x="16" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 ${MARGIN.top + PLOT_H / 2})">${esc(yLabel)}</text>`,
    `<text x="${MARGIN.left + PLOT_W / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" font-size="12">${esc(xLabel)}</text>`,
    ...body,
    "</svg>",
  ];
  return parts.join("\n");
}

export function renderBarChart(labels: string[], values: number[], title: string): string {
  const top = Math.max(...values, 0) * 1.08 || 1;
  const slot = PLOT_W / labels.length;
  const barWidth = slot * 0.6;
  const body: string[] = [];
  labels.forEach((label, i) => {
    const h = (values[i] / top) * PLOT_H;
    const x = MARGIN.left + i * slot + (slot - barWidth) / 2;
    const y = MARGIN.top + PLOT_H - h;
    body.push(
      `<rect data-scheme="${esc(label)}" data-value="${values[i]}" x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${barWidth.toFixed(2)}" height="${h.toFixed(2)}" fill="${COLORS[i % COLORS.length]}"/>`,
      `<text x="${(x + barWidth / 2).toFixed(2)}" y="${(y - 6).toFixed(2)}" text-anchor="middle" font-family="sans-serif" font-size="11">${values[i].toFixed(3)}</text>`,
      `<text x="${(x + barWidth / 2).toFixed(2)}" y="${MARGIN.top + PLOT_H + 18}" text-anchor="middle" font-family="sans-serif" font-size="12">${esc(label)}</text>`,
    );
  });
  return frame(title, body, "average completion time", "scheme");
}

export function renderLineChart(
  series: { label: string; xs: number[]; ys: number[] }[],
  title: string,
): string {
  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys);
  const xMin = Math.min(...allX);
  const xMax = Math.max(...allX, xMin + 1);
  const yTop = Math.max(...allY, 0) * 1.08 || 1;
  const sx = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * PLOT_W;
  const sy = (y: number) => MARGIN.top + PLOT_H - (y / yTop) * PLOT_H;
  const body: string[] = [];
  series.forEach((s, i) => {
    const points = s.xs.map((x, j) => `${sx(x).toFixed(2)},${sy(s.ys[j]).toFixed(2)}`).join(" ");
    body.push(
      `<polyline data-scheme="${esc(s.label)}" fill="none" stroke="${COLORS[i % COLORS.length]}" stroke-width="1.5" points="${points}"/>`,
      `<text x="${MARGIN.left + PLOT_W - 8}" y="${MARGIN.top + 16 + i * 16}" text-anchor="end" font-family="sans-serif" font-size="12" fill="${COLORS[i % COLORS.length]}">${esc(s.label)}</text>`,
    );
  });
  return frame(title, body, "cumulative mean completion time", "iteration");
}

export function renderHistogram(
  bins: number[],
  counts: Record<string, number[]>,
  title: string,
): string {
  const schemes = Object.keys(counts);
  const top = Math.max(...schemes.flatMap((s) => counts[s]), 0) * 1.08 || 1;
  const slot = PLOT_W / bins.length;
  const barWidth = (slot * 0.8) / schemes.length;
  const body: string[] = [];
  bins.forEach((bin, b) => {
    schemes.forEach((scheme, i) => {
      const value = counts[scheme][b];
      const h = (value / top) * PLOT_H;
      const x = MARGIN.left + b * slot + slot * 0.1 + i * barWidth;
      const y = MARGIN.top + PLOT_H - h;
      body.push(
        `<rect data-scheme="${esc(scheme)}" data-bin="${bin}" data-value="${value}" x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${barWidth.toFixed(2)}" height="${h.toFixed(2)}" fill="${COLORS[i % COLORS.length]}"/>`,
      );
    });
    body.push(
      `<text x="${(MARGIN.left + b * slot + slot / 2).toFixed(2)}" y="${MARGIN.top + PLOT_H + 18}" text-anchor="middle" font-family="sans-serif" font-size="12">${bin}</text>`,
    );
  });
  schemes.forEach((scheme, i) => {
    body.push(
      `<text x="${MARGIN.left + PLOT_W - 8}" y="${MARGIN.top + 16 + i * 16}" text-anchor="end" font-family="sans-serif" font-size="12" fill="${COLORS[i % COLORS.length]}">${esc(scheme)}</text>`,
    );
  });
  return frame(title, body, "iterations", "max stragglers in any cluster");
}
