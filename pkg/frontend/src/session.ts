/** Click-session state: ordered points, preference slider, current route.
 *
 * The first click is the departure, the last click the destination, and
 * everything in between a waypoint, so each new click extends the trip.
 * All updates return fresh objects; the app layer owns the single instance.
 */

import type { LatLng, RouteRequestBody, RouteResponse } from "./types.js";

export type OverlayMode = "none" | "risk" | "contours" | "utilization";

export interface UiSession {
  points: LatLng[];
  alpha: number;
  route: RouteResponse | null;
  overlay: OverlayMode;
  boxcox: boolean;
}

export const DEFAULT_ALPHA = 0.3;

export function emptySession(alpha: number = DEFAULT_ALPHA): UiSession {
  return { points: [], alpha, route: null, overlay: "none", boxcox: false };
}

export function addPoint(session: UiSession, point: LatLng): UiSession {
  return { ...session, points: [...session.points, point] };
}

export function clearPoints(session: UiSession): UiSession {
  return { ...session, points: [], route: null };
}

/** Clamp to [0, 1] and snap to hundredths, matching the slider steps. */
export function snapAlpha(value: number): number {
  const clamped = Math.min(1, Math.max(0, value));
  return Math.round(clamped * 100) / 100;
}

export function setAlpha(session: UiSession, value: number): UiSession {
  return { ...session, alpha: snapAlpha(value) };
}

export function setRoute(session: UiSession, route: RouteResponse | null): UiSession {
  return { ...session, route };
}

/** The route request for the current points, or null while under two clicks. */
export function routeQuery(session: UiSession): RouteRequestBody | null {
  if (session.points.length < 2) {
    return null;
  }
  return {
    from: session.points[0],
    to: session.points[session.points.length - 1],
    waypoints: session.points.slice(1, -1),
    alpha: session.alpha,
  };
}
