import { ApiClient } from "./api.js";
import { App } from "./app.js";

async function boot(): Promise<void> {
  const container = document.getElementById("app");
  if (!container) {
    return;
  }
  const params = new URLSearchParams(window.location.search);
  const client = new ApiClient(params.get("server") ?? "");
  try {
    await App.create(container, client, { tileTemplate: params.get("tiles") ?? undefined });
  } catch {
    container.innerHTML =
      '<p class="boot-error">The route service is not reachable (or still estimating). ' +
      "Start it with <code>bikerisk serve</code> and reload.</p>";
  }
}

void boot();
