// Countdown text for evaluation windows: HH:MM:SS until the close.

export function countdownText(closesAtIso: string, nowMs: number): string {
  const closesMs = Date.parse(closesAtIso);
  if (Number.isNaN(closesMs)) return "--:--:--";
  const left = Math.max(0, Math.floor((closesMs - nowMs) / 1000));
  const hours = Math.floor(left / 3600);
  const minutes = Math.floor((left % 3600) / 60);
  const seconds = left % 60;
  const pad = (n: number) => String(n).padStart(2, "0");
  return `${pad(hours)}:${pad(minutes)}:${pad(seconds)}`;
}

export function windowClosed(closesAtIso: string, nowMs: number): boolean {
  const closesMs = Date.parse(closesAtIso);
  return Number.isNaN(closesMs) ? true : nowMs >= closesMs;
}
