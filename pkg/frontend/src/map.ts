/** SVG map: street basemap, overlays, route polyline, and click markers.
 *
 * The default basemap is the street graph itself, so the app works with no
 * tile server at all; a slippy-tile URL template can be supplied to draw
 * web-mercator tiles underneath.
 */

import { argmaxCell, deltaColor, maxValue, riskColor } from "./color.js";
import type {
  BBox,
  FeatureCollection,
  GridResponse,
  LatLng,
  NetworkResponse,
  RouteResponse,
  UtilizationCollection,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 1000;
const MAX_HEATMAP_CELLS = 140;

export class SvgMap {
  readonly svg: SVGSVGElement;
  private height: number;
  private layers: Record<string, SVGGElement> = {};
  private bbox: BBox;

  constructor(
    container: HTMLElement,
    bbox: BBox,
    private onClick: (p: LatLng) => void,
    tileTemplate?: string,
  ) {
    this.bbox = bbox;
    const midLat = (bbox.min_lat + bbox.max_lat) / 2;
    const aspect =
      (bbox.max_lat - bbox.min_lat) /
      ((bbox.max_lon - bbox.min_lon) * Math.cos((midLat * Math.PI) / 180));
    this.height = Math.round(WIDTH * aspect);
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("viewBox", `0 0 ${WIDTH} ${this.height}`);
    this.svg.setAttribute("class", "map");
    for (const name of ["tiles", "heatmap", "utilization", "network", "contours", "route", "markers"]) {
      const g = document.createElementNS(SVG_NS, "g");
      g.setAttribute("data-layer", name);
      this.layers[name] = g;
      this.svg.appendChild(g);
    }
    this.svg.addEventListener("click", (ev) => {
      const rect = this.svg.getBoundingClientRect();
      if (rect.width === 0 || rect.height === 0) {
        return;
      }
      const x = ((ev.clientX - rect.left) / rect.width) * WIDTH;
      const y = ((ev.clientY - rect.top) / rect.height) * this.height;
      this.onClick(this.unproject(x, y));
    });
    container.appendChild(this.svg);
    if (tileTemplate) {
      this.renderTiles(tileTemplate);
    }
  }

  project(lat: number, lon: number): [number, number] {
    const x = ((lon - this.bbox.min_lon) / (this.bbox.max_lon - this.bbox.min_lon)) * WIDTH;
    const y = ((this.bbox.max_lat - lat) / (this.bbox.max_lat - this.bbox.min_lat)) * this.height;
    return [x, y];
  }

  unproject(x: number, y: number): LatLng {
    return {
      lat: this.bbox.max_lat - (y / this.height) * (this.bbox.max_lat - this.bbox.min_lat),
      lon: this.bbox.min_lon + (x / WIDTH) * (this.bbox.max_lon - this.bbox.min_lon),
    };
  }

  private clear(layer: string): SVGGElement {
    const g = this.layers[layer];
    while (g.firstChild) {
      g.removeChild(g.firstChild);
    }
    return g;
  }

  setNetwork(doc: NetworkResponse): void {
    const g = this.clear("network");
    const byId = new Map(doc.nodes.map((n) => [n[0], n] as const));
    for (const e of doc.edges) {
      const a = byId.get(e.u);
      const b = byId.get(e.v);
      if (!a || !b) {
        continue;
      }
      const [x1, y1] = this.project(a[1], a[2]);
      const [x2, y2] = this.project(b[1], b[2]);
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(x1));
      line.setAttribute("y1", String(y1));
      line.setAttribute("x2", String(x2));
      line.setAttribute("y2", String(y2));
      line.setAttribute("stroke", "#b8b8b8");
      line.setAttribute("stroke-width", "2");
      g.appendChild(line);
    }
  }

  setRoute(route: RouteResponse | null): void {
    const g = this.clear("route");
    if (!route || route.coordinates.length < 2) {
      return;
    }
    const pts = route.coordinates
      .map(([lat, lon]) => this.project(lat, lon).join(","))
      .join(" ");
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("points", pts);
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "#1257c9");
    line.setAttribute("stroke-width", "6");
    line.setAttribute("stroke-linejoin", "round");
    g.appendChild(line);
  }

  setMarkers(points: LatLng[]): void {
    const g = this.clear("markers");
    points.forEach((p, i) => {
      const [x, y] = this.project(p.lat, p.lon);
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(x));
      circle.setAttribute("cy", String(y));
      circle.setAttribute("r", "9");
      const kind = i === 0 ? "departure" : i === points.length - 1 ? "destination" : "waypoint";
      circle.setAttribute("data-kind", points.length === 1 ? "departure" : kind);
      circle.setAttribute(
        "fill",
        kind === "departure" ? "#1f9d3a" : kind === "destination" ? "#d03325" : "#666666",
      );
      circle.setAttribute("stroke", "white");
      circle.setAttribute("stroke-width", "2.5");
      g.appendChild(circle);
    });
  }

  /** Down-sampled cell heatmap; returns the argmax cell for the legend. */
  setHeatmap(grid: GridResponse | null): { row: number; col: number } | null {
    const g = this.clear("heatmap");
    if (!grid) {
      return null;
    }
    const strideX = Math.max(1, Math.ceil(grid.nx / MAX_HEATMAP_CELLS));
    const strideY = Math.max(1, Math.ceil(grid.ny / MAX_HEATMAP_CELLS));
    const top = maxValue(grid.values);
    const dLon = (grid.bbox.max_lon - grid.bbox.min_lon) / (grid.nx - 1);
    const dLat = (grid.bbox.max_lat - grid.bbox.min_lat) / (grid.ny - 1);
    for (let r = 0; r < grid.ny; r += strideY) {
      for (let c = 0; c < grid.nx; c += strideX) {
        const v = grid.values[r * grid.nx + c];
        const lat = grid.bbox.min_lat + r * dLat;
        const lon = grid.bbox.min_lon + c * dLon;
        const [x, y] = this.project(lat + dLat * strideY, lon);
        const [x2, y2] = this.project(lat, lon + dLon * strideX);
        const rect = document.createElementNS(SVG_NS, "rect");
        rect.setAttribute("x", String(x));
        rect.setAttribute("y", String(y));
        rect.setAttribute("width", String(Math.max(0.5, x2 - x)));
        rect.setAttribute("height", String(Math.max(0.5, y2 - y)));
        rect.setAttribute("fill", riskColor(top > 0 ? v / top : 0));
        rect.setAttribute("fill-opacity", "0.55");
        g.appendChild(rect);
      }
    }
    return argmaxCell(grid.values, grid.nx);
  }

  setContours(doc: FeatureCollection | null): void {
    const g = this.clear("contours");
    if (!doc) {
      return;
    }
    const levels = [...new Set(doc.features.map((f) => f.properties.level))].sort((a, b) => a - b);
    const top = levels[levels.length - 1] ?? 1;
    for (const feature of doc.features) {
      const pts = feature.geometry.coordinates
        .map(([lon, lat]) => this.project(lat, lon).join(","))
        .join(" ");
      const line = document.createElementNS(SVG_NS, "polyline");
      line.setAttribute("points", pts);
      line.setAttribute("fill", "none");
      line.setAttribute("stroke", riskColor(top > 0 ? feature.properties.level / top : 0));
      line.setAttribute("stroke-width", "3");
      line.setAttribute("data-level", String(feature.properties.level));
      g.appendChild(line);
    }
  }

  setUtilization(doc: UtilizationCollection | null): void {
    const g = this.clear("utilization");
    if (!doc) {
      return;
    }
    let maxAbs = 0;
    for (const f of doc.features) {
      maxAbs = Math.max(maxAbs, Math.abs(f.properties.delta));
    }
    for (const f of doc.features) {
      const pts = f.geometry.coordinates
        .map(([lon, lat]) => this.project(lat, lon).join(","))
        .join(" ");
      const line = document.createElementNS(SVG_NS, "polyline");
      line.setAttribute("points", pts);
      line.setAttribute("fill", "none");
      line.setAttribute("stroke", deltaColor(f.properties.delta, maxAbs));
      line.setAttribute("stroke-width", f.properties.delta === 0 ? "1.5" : "4");
      g.appendChild(line);
    }
  }

  private renderTiles(template: string): void {
    const g = this.clear("tiles");
    const zoom = this.pickZoom();
    const n = 2 ** zoom;
    const toTileX = (lon: number) => ((lon + 180) / 360) * n;
    const toTileY = (lat: number) => {
      const rad = (lat * Math.PI) / 180;
      return ((1 - Math.log(Math.tan(rad) + 1 / Math.cos(rad)) / Math.PI) / 2) * n;
    };
    const x0 = Math.floor(toTileX(this.bbox.min_lon));
    const x1 = Math.floor(toTileX(this.bbox.max_lon));
    const y0 = Math.floor(toTileY(this.bbox.max_lat));
    const y1 = Math.floor(toTileY(this.bbox.min_lat));
    for (let tx = x0; tx <= x1; tx++) {
      for (let ty = y0; ty <= y1; ty++) {
        const lonLeft = (tx / n) * 360 - 180;
        const lonRight = ((tx + 1) / n) * 360 - 180;
        const latTop = (Math.atan(Math.sinh(Math.PI * (1 - (2 * ty) / n))) * 180) / Math.PI;
        const latBottom = (Math.atan(Math.sinh(Math.PI * (1 - (2 * (ty + 1)) / n))) * 180) / Math.PI;
        const [px, py] = this.project(latTop, lonLeft);
        const [px2, py2] = this.project(latBottom, lonRight);
        const img = document.createElementNS(SVG_NS, "image");
        img.setAttribute("x", String(px));
        img.setAttribute("y", String(py));
        img.setAttribute("width", String(px2 - px));
        img.setAttribute("height", String(py2 - py));
        img.setAttribute(
          "href",
          template.replace("{z}", String(zoom)).replace("{x}", String(tx)).replace("{y}", String(ty)),
        );
        g.appendChild(img);
      }
    }
  }

  private pickZoom(): number {
    const spanLon = this.bbox.max_lon - this.bbox.min_lon;
    // aim for roughly 4 tiles across
    return Math.min(18, Math.max(1, Math.round(Math.log2((360 / spanLon) * 4))));
  }
}
