/** Application wiring: DOM controls, click flow, and request sequencing.
 *
 * The UI computes nothing itself: every displayed number is a field of a
 * service response, shown verbatim. At most one route request is in flight
 * logically; responses carry a sequence number and stale ones are dropped,
 * so the rendered route always corresponds to the latest points and alpha.
 */

import { ApiClient, ApiError } from "./api.js";
import { SvgMap } from "./map.js";
import {
  DEFAULT_ALPHA,
  UiSession,
  addPoint,
  clearPoints,
  emptySession,
  routeQuery,
  setAlpha,
  setRoute,
  type OverlayMode,
} from "./session.js";
import type { BBox, LatLng, UtilizationCollection } from "./types.js";

const CONTOUR_LEVEL_COUNT = 5;

export interface AppOptions {
  tileTemplate?: string;
}

export class App {
  session: UiSession = emptySession();
  map!: SvgMap;
  private requestSeq = 0;
  private bbox!: BBox;
  private utilization: UtilizationCollection | null = null;

  readonly root: HTMLElement;
  alphaSlider!: HTMLInputElement;
  alphaValue!: HTMLElement;
  totals!: { risk: HTMLElement; discomfort: HTMLElement; length: HTMLElement };
  banner!: HTMLElement;
  overlaySelect!: HTMLSelectElement;
  boxcoxToggle!: HTMLInputElement;
  exportButton!: HTMLButtonElement;
  clearButton!: HTMLButtonElement;
  legend!: HTMLElement;

  private constructor(
    container: HTMLElement,
    private client: ApiClient,
    private options: AppOptions = {},
  ) {
    this.root = container;
  }

  static async create(container: HTMLElement, client: ApiClient, options: AppOptions = {}): Promise<App> {
    const app = new App(container, client, options);
    await app.init();
    return app;
  }

  private async init(): Promise<void> {
    const health = await this.client.health();
    this.bbox = (health.config?.bbox as BBox) ?? {
      min_lat: 47.365,
      min_lon: 8.5141,
      max_lat: 47.3886,
      max_lon: 8.5523,
    };
    this.buildDom();
    this.map = new SvgMap(
      this.root.querySelector(".map-holder") as HTMLElement,
      this.bbox,
      (p) => void this.clickAt(p.lat, p.lon),
      this.options.tileTemplate,
    );
    const network = await this.client.fetchNetwork();
    this.map.setNetwork(network);
  }

  private buildDom(): void {
    this.root.innerHTML = `
      <div class="sidebar">
        <h1>bike route planner</h1>
        <p class="hint">Click the map: first the departure, then optional waypoints, last the destination.</p>
        <div class="banner" hidden></div>
        <label class="alpha-row">safety weight &alpha;
          <input type="range" class="alpha" min="0" max="1" step="0.01" value="${DEFAULT_ALPHA}">
          <span class="alpha-value">${DEFAULT_ALPHA}</span>
        </label>
        <div class="totals">
          <div>risk <span class="total-risk">&ndash;</span></div>
          <div>discomfort <span class="total-discomfort">&ndash;</span></div>
          <div>length (m) <span class="total-length">&ndash;</span></div>
        </div>
        <div class="buttons">
          <button class="clear">clear</button>
          <button class="export" disabled>export .txt</button>
        </div>
        <label>overlay
          <select class="overlay">
            <option value="none">none</option>
            <option value="risk">risk heatmap</option>
            <option value="contours">risk contours</option>
            <option value="utilization" disabled>utilization deltas</option>
          </select>
        </label>
        <label class="boxcox-row"><input type="checkbox" class="boxcox"> compress dynamic range (&radic;)</label>
        <label class="util-row">utilization GeoJSON
          <input type="file" class="util-file" accept=".geojson,.json">
        </label>
        <div class="legend"></div>
      </div>
      <div class="map-holder"></div>
    `;
    this.banner = this.root.querySelector(".banner") as HTMLElement;
    this.alphaSlider = this.root.querySelector(".alpha") as HTMLInputElement;
    this.alphaValue = this.root.querySelector(".alpha-value") as HTMLElement;
    this.totals = {
      risk: this.root.querySelector(".total-risk") as HTMLElement,
      discomfort: this.root.querySelector(".total-discomfort") as HTMLElement,
      length: this.root.querySelector(".total-length") as HTMLElement,
    };
    this.overlaySelect = this.root.querySelector(".overlay") as HTMLSelectElement;
    this.boxcoxToggle = this.root.querySelector(".boxcox") as HTMLInputElement;
    this.exportButton = this.root.querySelector(".export") as HTMLButtonElement;
    this.clearButton = this.root.querySelector(".clear") as HTMLButtonElement;
    this.legend = this.root.querySelector(".legend") as HTMLElement;

    this.alphaSlider.addEventListener("input", () => {
      void this.setAlphaValue(Number(this.alphaSlider.value));
    });
    this.clearButton.addEventListener("click", () => this.clear());
    this.exportButton.addEventListener("click", () => void this.exportRoute());
    this.overlaySelect.addEventListener("change", () => {
      void this.setOverlay(this.overlaySelect.value as OverlayMode);
    });
    this.boxcoxToggle.addEventListener("change", () => {
      void this.setBoxcox(this.boxcoxToggle.checked);
    });
    const fileInput = this.root.querySelector(".util-file") as HTMLInputElement;
    fileInput.addEventListener("change", () => {
      const file = fileInput.files?.[0];
      if (!file) {
        return;
      }
      void file.text().then((text) => this.loadUtilization(text));
    });
  }

  private showBanner(message: string): void {
    this.banner.textContent = message;
    this.banner.hidden = false;
  }

  private hideBanner(): void {
    this.banner.hidden = true;
    this.banner.textContent = "";
  }

  /** Register a map click; fires a route request once two points exist. */
  async clickAt(lat: number, lon: number): Promise<void> {
    const inside =
      lat >= this.bbox.min_lat && lat <= this.bbox.max_lat && lon >= this.bbox.min_lon && lon <= this.bbox.max_lon;
    if (!inside) {
      this.showBanner("point outside the network area; it will match the nearest street node");
    }
    this.session = addPoint(this.session, { lat, lon });
    this.map.setMarkers(this.session.points);
    await this.requestRoute();
  }

  clear(): void {
    this.session = clearPoints(this.session);
    this.map.setMarkers([]);
    this.map.setRoute(null);
    this.renderTotals();
    this.hideBanner();
  }

  async setAlphaValue(value: number): Promise<void> {
    this.session = setAlpha(this.session, value);
    this.alphaSlider.value = String(this.session.alpha);
    this.alphaValue.textContent = String(this.session.alpha);
    await this.requestRoute();
  }

  private async requestRoute(): Promise<void> {
    const query = routeQuery(this.session);
    if (!query) {
      return;
    }
    const seq = ++this.requestSeq;
    try {
      const route = await this.client.postRoute(query);
      if (seq !== this.requestSeq) {
        return; // a newer request superseded this one
      }
      this.session = setRoute(this.session, route);
      this.map.setRoute(route);
      this.renderTotals();
      this.hideBanner();
    } catch (err) {
      if (seq !== this.requestSeq) {
        return;
      }
      if (err instanceof ApiError && err.status === 404) {
        this.showBanner("no route between these points");
      } else {
        this.showBanner("route request failed; the server may be down");
      }
    }
  }

  private renderTotals(): void {
    const route = this.session.route;
    // totals are shown exactly as the service reported them
    this.totals.risk.textContent = route ? String(route.total_risk) : "–";
    this.totals.discomfort.textContent = route ? String(route.total_discomfort) : "–";
    this.totals.length.textContent = route ? String(route.total_length_m) : "–";
    this.exportButton.disabled = !route;
  }

  /** Fetch the server-side .txt export and hand it to the browser download. */
  async exportRoute(): Promise<string | null> {
    const query = routeQuery(this.session);
    if (!query) {
      return null;
    }
    try {
      const text = await this.client.exportRouteTxt(query);
      this.download("route.txt", text);
      return text;
    } catch {
      this.showBanner("export failed");
      return null;
    }
  }

  private download(name: string, text: string): void {
    if (typeof URL.createObjectURL !== "function") {
      return; // not available outside the browser
    }
    const url = URL.createObjectURL(new Blob([text], { type: "text/plain" }));
    const a = document.createElement("a");
    a.href = url;
    a.download = name;
    a.click();
    URL.revokeObjectURL(url);
  }

  async setOverlay(mode: OverlayMode): Promise<void> {
    this.session = { ...this.session, overlay: mode };
    this.overlaySelect.value = mode;
    await this.refreshOverlay();
  }

  async setBoxcox(enabled: boolean): Promise<void> {
    this.session = { ...this.session, boxcox: enabled };
    this.boxcoxToggle.checked = enabled;
    await this.refreshOverlay();
  }

  loadUtilization(text: string): void {
    try {
      this.utilization = JSON.parse(text) as UtilizationCollection;
    } catch {
      this.showBanner("utilization file is not valid GeoJSON");
      return;
    }
    const option = this.overlaySelect.querySelector('option[value="utilization"]') as HTMLOptionElement;
    option.disabled = false;
    void this.setOverlay("utilization");
  }

  async refreshOverlay(): Promise<void> {
    const transform = this.session.boxcox ? "boxcox" : "raw";
    try {
      if (this.session.overlay === "risk") {
        const grid = await this.client.fetchRisk(transform);
        this.map.setHeatmap(grid);
        this.map.setContours(null);
        this.map.setUtilization(null);
        this.renderLegend("risk");
      } else if (this.session.overlay === "contours") {
        const grid = await this.client.fetchRisk(transform);
        const top = Math.max(...grid.values);
        const levels = Array.from({ length: CONTOUR_LEVEL_COUNT }, (_, i) =>
          Number(((top * (i + 1)) / (CONTOUR_LEVEL_COUNT + 1)).toPrecision(4)),
        );
        const doc = await this.client.fetchContours(levels, transform);
        this.map.setContours(doc);
        this.map.setHeatmap(null);
        this.map.setUtilization(null);
        this.renderLegend("contours", levels);
      } else if (this.session.overlay === "utilization") {
        this.map.setUtilization(this.utilization);
        this.map.setHeatmap(null);
        this.map.setContours(null);
        this.renderLegend("utilization");
      } else {
        this.map.setHeatmap(null);
        this.map.setContours(null);
        this.map.setUtilization(null);
        this.renderLegend("none");
      }
    } catch {
      this.showBanner("overlay data unavailable");
    }
  }

  private renderLegend(mode: OverlayMode | "none", levels: number[] = []): void {
    if (mode === "risk") {
      this.legend.innerHTML = '<span class="low">low</span> <span class="ramp"></span> <span class="high">high risk (orange)</span>';
    } else if (mode === "contours") {
      this.legend.innerHTML = levels.map((l) => `<div class="legend-entry">level ${l}</div>`).join("");
    } else if (mode === "utilization") {
      this.legend.innerHTML =
        '<div class="legend-entry"><span class="swatch orange"></span> more traversals</div>' +
        '<div class="legend-entry"><span class="swatch purple"></span> fewer traversals</div>';
    } else {
      this.legend.innerHTML = "";
    }
  }
}
