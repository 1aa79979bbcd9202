// Turn transport failures into the text a person sees. Server messages
// pass through; only auth and window-close get a friendlier framing.

import { ApiError } from "./api.js";

export function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    if (err.status === 401) return "Not signed in: enter a valid access token.";
    if (err.status === 403) return `Access denied: ${err.message}`;
    if (err.status === 409 && err.slug === "window_closed") {
      return `The evaluation window has closed (server said: ${err.message}).`;
    }
    return err.message;
  }
  return err instanceof Error ? err.message : String(err);
}
