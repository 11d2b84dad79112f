/** Shapes of the HTTP API payloads the UI consumes. */

export interface LatLng {
  lat: number;
  lon: number;
}

export interface RouteRequestBody {
  from: LatLng;
  to: LatLng;
  waypoints: LatLng[];
  alpha: number;
}

export interface RouteResponse {
  nodes: number[];
  coordinates: [number, number][]; // [lat, lon] per node
  total_risk: number;
  total_discomfort: number;
  total_length_m: number;
  total_cost: number | null;
  alpha: number;
}

export interface BBox {
  min_lat: number;
  min_lon: number;
  max_lat: number;
  max_lon: number;
}

export interface GridResponse {
  bbox: BBox;
  nx: number;
  ny: number;
  margin: number;
  order: string;
  values: number[]; // row-major, south-to-north rows
  transform: string;
}

export interface NetworkEdge {
  id: number;
  u: number;
  v: number;
  length_m: number;
  grade: number;
  w_r: number;
  w_d_fwd: number;
  w_d_bwd: number;
}

export interface NetworkResponse {
  nodes: [number, number, number, number][]; // [id, lat, lon, alt]
  edges: NetworkEdge[];
}

export interface ContourFeature {
  type: "Feature";
  geometry: { type: "LineString"; coordinates: [number, number][] }; // [lon, lat]
  properties: { level: number };
}

export interface FeatureCollection {
  type: "FeatureCollection";
  features: ContourFeature[];
  metadata?: Record<string, unknown>;
}

export interface UtilizationFeature {
  type: "Feature";
  geometry: { type: "LineString"; coordinates: [number, number][] };
  properties: { edge: number; count_ref: number; count_cmp: number; delta: number };
}

export interface UtilizationCollection {
  type: "FeatureCollection";
  features: UtilizationFeature[];
  metadata?: Record<string, unknown>;
}

export interface HealthResponse {
  status: string;
  version?: string;
  config?: Record<string, unknown>;
  counts?: Record<string, number>;
}
