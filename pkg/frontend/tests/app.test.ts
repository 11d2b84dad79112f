import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import {
  MockServer,
  ROUTE_DOC,
  basicServer,
  jsonResponse,
} from "./mock_server.js";

async function makeApp(server: MockServer): Promise<App> {
  const container = document.createElement("div");
  document.body.appendChild(container);
  return App.create(container, new ApiClient("", server.fetch));
}

const flush = () => new Promise((r) => setTimeout(r, 0));

describe("ui contract", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("two clicks then a slider move issue exactly the expected route requests", async () => {
    const server = basicServer();
    const app = await makeApp(server);

    await app.clickAt(0.31, 0.32);
    expect(server.callsTo("/api/route").length).toBe(0); // one point is not a route yet

    await app.clickAt(0.69, 0.71);
    let calls = server.callsTo("/api/route").filter((c) => !c.url.includes("export"));
    expect(calls.length).toBe(1);
    expect(calls[0].body).toEqual({
      from: { lat: 0.31, lon: 0.32 },
      to: { lat: 0.69, lon: 0.71 },
      waypoints: [],
      alpha: 0.3,
    });

    app.alphaSlider.value = "0.57";
    app.alphaSlider.dispatchEvent(new Event("input"));
    await flush();
    calls = server.callsTo("/api/route").filter((c) => !c.url.includes("export"));
    expect(calls.length).toBe(2);
    expect(calls[1].body).toEqual({
      from: { lat: 0.31, lon: 0.32 },
      to: { lat: 0.69, lon: 0.71 },
      waypoints: [],
      alpha: 0.57,
    });
    expect(app.alphaValue.textContent).toBe("0.57");
  });

  it("a third click turns the previous destination into a waypoint", async () => {
    const server = basicServer();
    const app = await makeApp(server);
    await app.clickAt(0.1, 0.1);
    await app.clickAt(0.5, 0.5);
    await app.clickAt(0.9, 0.9);
    const calls = server.callsTo("/api/route").filter((c) => !c.url.includes("export"));
    expect(calls.length).toBe(2);
    expect(calls[1].body).toEqual({
      from: { lat: 0.1, lon: 0.1 },
      to: { lat: 0.9, lon: 0.9 },
      waypoints: [{ lat: 0.5, lon: 0.5 }],
      alpha: 0.3,
    });
    const markers = app.root.querySelectorAll('[data-layer="markers"] circle');
    expect(markers.length).toBe(3);
    expect(markers[1].getAttribute("data-kind")).toBe("waypoint");
  });

  it("displays the mocked totals verbatim", async () => {
    const server = basicServer();
    const app = await makeApp(server);
    await app.clickAt(0.31, 0.32);
    await app.clickAt(0.69, 0.71);
    expect(app.totals.risk.textContent).toBe(String(ROUTE_DOC.total_risk));
    expect(app.totals.discomfort.textContent).toBe(String(ROUTE_DOC.total_discomfort));
    expect(app.totals.length.textContent).toBe(String(ROUTE_DOC.total_length_m));
    const polyline = app.root.querySelector('[data-layer="route"] polyline');
    expect(polyline).not.toBeNull();
  });

  it("export returns the server payload byte for byte", async () => {
    const server = basicServer();
    const app = await makeApp(server);
    await app.clickAt(0.3, 0.3);
    await app.clickAt(0.7, 0.7);
    const text = await app.exportRoute();
    expect(text).toBe("0.300000,0.300000\n0.700000,0.700000\nrisk=123.456789\ndiscomfort=67.890120\n");
    const exportCalls = server.callsTo("/api/route/export");
    expect(exportCalls.length).toBe(1);
    expect(exportCalls[0].body).toEqual({
      from: { lat: 0.3, lon: 0.3 },
      to: { lat: 0.7, lon: 0.7 },
      waypoints: [],
      alpha: 0.3,
    });
  });

  it("stale responses are discarded (latest request wins)", async () => {
    const resolvers: ((r: Response) => void)[] = [];
    const server = basicServer();
    server.calls = [];
    const slowServer = new MockServer()
      .on("/api/health", () => jsonResponse({ status: "ok", config: { bbox: { min_lat: 0, min_lon: 0, max_lat: 1, max_lon: 1 } } }))
      .on("/api/network", () => jsonResponse({ nodes: [], edges: [] }))
      .on("/api/route", () => new Promise<Response>((resolve) => resolvers.push(resolve)));
    const app = await makeApp(slowServer);
    await app.clickAt(0.2, 0.2);
    const firstDone = app.clickAt(0.8, 0.8); // request 1, held open
    const secondDone = app.setAlphaValue(0.9); // request 2, held open
    await flush();
    expect(resolvers.length).toBe(2);
    // resolve out of order: the newer request first, then the stale one
    resolvers[1](jsonResponse({ ...ROUTE_DOC, total_risk: 222.0, alpha: 0.9 }));
    await secondDone;
    resolvers[0](jsonResponse({ ...ROUTE_DOC, total_risk: 111.0, alpha: 0.3 }));
    await firstDone;
    expect(app.totals.risk.textContent).toBe("222");
    expect(app.session.route?.alpha).toBe(0.9);
  });

  it("a 404 shows a banner without losing the session", async () => {
    const server = new MockServer()
      .on("/api/health", () => jsonResponse({ status: "ok", config: { bbox: { min_lat: 0, min_lon: 0, max_lat: 1, max_lon: 1 } } }))
      .on("/api/network", () => jsonResponse({ nodes: [], edges: [] }))
      .on("/api/route", () => jsonResponse({ detail: "unreachable" }, 404));
    const app = await makeApp(server);
    await app.clickAt(0.2, 0.2);
    await app.clickAt(0.8, 0.8);
    expect(app.banner.hidden).toBe(false);
    expect(app.banner.textContent).toContain("no route");
    expect(app.session.points.length).toBe(2);
  });

  it("a network failure shows a banner and preserves the session", async () => {
    let fail = false;
    const good = basicServer();
    const server = new MockServer()
      .on("/api/health", () => jsonResponse({ status: "ok", config: { bbox: { min_lat: 0, min_lon: 0, max_lat: 1, max_lon: 1 } } }))
      .on("/api/network", () => jsonResponse({ nodes: [], edges: [] }))
      .on("/api/route", (call) => {
        if (fail) {
          throw new Error("connection refused");
        }
        return good.fetch("/api/route", { method: "POST", body: JSON.stringify(call.body) });
      });
    const app = await makeApp(server);
    await app.clickAt(0.2, 0.2);
    await app.clickAt(0.8, 0.8);
    fail = true;
    await app.setAlphaValue(0.8);
    expect(app.banner.hidden).toBe(false);
    expect(app.session.points.length).toBe(2);
    expect(app.session.alpha).toBe(0.8);
  });

  it("clicks outside the network area warn but are accepted", async () => {
    const server = basicServer();
    const app = await makeApp(server);
    await app.clickAt(2.5, 2.5);
    expect(app.banner.hidden).toBe(false);
    expect(app.session.points.length).toBe(1);
    await app.clickAt(0.5, 0.5);
    expect(server.callsTo("/api/route").length).toBe(1);
  });

  it("clear empties the session and totals", async () => {
    const server = basicServer();
    const app = await makeApp(server);
    await app.clickAt(0.2, 0.2);
    await app.clickAt(0.8, 0.8);
    app.clear();
    expect(app.session.points).toEqual([]);
    expect(app.totals.risk.textContent).toBe("–");
    expect(app.exportButton.disabled).toBe(true);
    expect(app.root.querySelectorAll('[data-layer="markers"] circle').length).toBe(0);
  });

  it("risk overlay follows the transform toggle", async () => {
    const gridDoc = {
      bbox: { min_lat: 0, min_lon: 0, max_lat: 1, max_lon: 1 },
      nx: 2, ny: 2, margin: 0, order: "row-major", values: [0.0, 1.0, 4.0, 2.0], transform: "raw",
    };
    const server = basicServer()
      .on("/api/risk", (call) => {
        const boxcox = call.url.includes("boxcox");
        return jsonResponse({
          ...gridDoc,
          values: boxcox ? gridDoc.values.map(Math.sqrt) : gridDoc.values,
          transform: boxcox ? "boxcox" : "raw",
        });
      });
    const app = await makeApp(server);
    await app.setOverlay("risk");
    expect(server.calls.some((c) => c.url === "/api/risk?transform=raw")).toBe(true);
    const rectsRaw = app.root.querySelectorAll('[data-layer="heatmap"] rect').length;
    expect(rectsRaw).toBeGreaterThan(0);
    await app.setBoxcox(true);
    expect(server.calls.some((c) => c.url === "/api/risk?transform=boxcox")).toBe(true);
  });

  it("utilization overlay stays disabled until a file is loaded", async () => {
    const server = basicServer();
    const app = await makeApp(server);
    const option = app.overlaySelect.querySelector('option[value="utilization"]') as HTMLOptionElement;
    expect(option.disabled).toBe(true);
    app.loadUtilization(JSON.stringify({
      type: "FeatureCollection",
      features: [
        { type: "Feature", geometry: { type: "LineString", coordinates: [[0.2, 0.2], [0.4, 0.4]] },
          properties: { edge: 0, count_ref: 1, count_cmp: 3, delta: 2 } },
      ],
    }));
    await flush();
    expect(option.disabled).toBe(false);
    expect(app.session.overlay).toBe("utilization");
    expect(app.root.querySelectorAll('[data-layer="utilization"] polyline').length).toBe(1);
  });
});
