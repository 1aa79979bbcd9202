// Outcome page view model: badge plus a four-bar chart of the published
// basis-point shares (10000 basis points = 100%).

import { LEVEL_LABELS, WIRE_LEVELS, type Points, type WireLevel } from "./types.js";

export interface ShareBar {
  level: WireLevel;
  label: string;
  basisPoints: number;
  /** Percentage with two decimals, e.g. "17.50" (basis points / 100). */
  percentText: string;
  /** CSS width percentage of the fullest bar. */
  widthPercent: number;
}

export function percentText(basisPoints: number): string {
  return (basisPoints / 100).toFixed(2);
}

export function shareBars(shares: Points): ShareBar[] {
  const max = Math.max(...WIRE_LEVELS.map((level) => shares[level]), 1);
  return WIRE_LEVELS.map((level) => ({
    level,
    label: LEVEL_LABELS[level],
    basisPoints: shares[level],
    percentText: percentText(shares[level]),
    widthPercent: (shares[level] / max) * 100,
  }));
}

/** Sum of the displayed percentages; rendering keeps this at 100 +/- 0.01. */
export function displayedPercentTotal(bars: ShareBar[]): number {
  return bars.reduce((acc, bar) => acc + Number(bar.percentText), 0);
}
