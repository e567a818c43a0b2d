/** Display formatting. The console formats service numbers, never computes
 * new ones — the only arithmetic here is the uplift ratio between two rates
 * the service reported.
 */

/** Conversion rate as a percentage, or an em dash before any impressions. */
export function formatRate(rate: number, impressions: number): string {
  if (impressions === 0) {
    return "—";
  }
  return `${(rate * 100).toFixed(1)}%`;
}

/** Relative uplift of a candidate rate over a baseline rate: (0.05, 0.07) → "+40%". */
export function formatUplift(baselineRate: number, candidateRate: number): string {
  if (baselineRate === 0) {
    return "—";
  }
  const uplift = candidateRate / baselineRate - 1;
  const percent = Math.round(uplift * 100);
  return `${percent >= 0 ? "+" : ""}${percent}%`;
}

export function formatCount(value: number): string {
  return value.toLocaleString("en-US");
}

/** Timestamps are shown as sent by the service, trimmed to the minute. */
export function formatStamp(iso: string): string {
  return iso.replace("T", " ").slice(0, 16);
}
