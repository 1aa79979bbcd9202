// Vote form arithmetic. The server re-validates everything; this gate just
// keeps obviously invalid ballots from leaving the browser.

import { WIRE_LEVELS, type Points, type WireLevel } from "./types.js";

export const TOTAL_POINTS = 100;

export interface FormState {
  points: Points;
  remaining: number;
  inputsValid: boolean;
  submitEnabled: boolean;
  message: string | null;
}

export function parsePointInput(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") return 0;
  if (!/^\d+$/.test(trimmed)) return null;
  const value = Number(trimmed);
  return Number.isSafeInteger(value) ? value : null;
}

export function formState(points: Points): FormState {
  const inputsValid = WIRE_LEVELS.every((level) => {
    const v = points[level];
    return Number.isInteger(v) && v >= 0 && v <= TOTAL_POINTS;
  });
  const sum = WIRE_LEVELS.reduce((acc, level) => acc + points[level], 0);
  const remaining = TOTAL_POINTS - sum;
  let message: string | null = null;
  if (!inputsValid) {
    message = `each level needs an integer between 0 and ${TOTAL_POINTS}`;
  } else if (remaining > 0) {
    message = `${remaining} point${remaining === 1 ? "" : "s"} left to allocate`;
  } else if (remaining < 0) {
    message = `${-remaining} point${remaining === -1 ? "" : "s"} over budget`;
  }
  return {
    points,
    remaining,
    inputsValid,
    submitEnabled: inputsValid && remaining === 0,
    message,
  };
}

export function emptyPoints(): Points {
  return { hnr: 0, nr: 0, r: 0, hr: 0 };
}

export function pointsFromInputs(
  raw: Record<WireLevel, string>,
): { points: Points; parseFailed: boolean } {
  const points = emptyPoints();
  let parseFailed = false;
  for (const level of WIRE_LEVELS) {
    const parsed = parsePointInput(raw[level]);
    if (parsed === null) {
      parseFailed = true;
      points[level] = -1; // forces formState invalid
    } else {
      points[level] = parsed;
    }
  }
  return { points, parseFailed };
}
