/**
 * Corpus dashboard: logged sentences with confirm/override ratios, model
 * stats, and the retrain button.
 */
import { ApiError, Client } from "./api.js";
import { ratioLabel } from "./viewmodel.js";

function el(tag: string, cls?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export async function renderDashboard(client: Client): Promise<HTMLElement> {
  const panel = el("div", "panel dashboard");
  panel.append(el("h3", "", "corpus"));

  const statsSlot = el("div", "modelStats");
  try {
    const stats = await client.modelStats();
    statsSlot.textContent =
      `model: ${stats.variant}, ${stats.exampleCount} examples, ` +
      `${stats.nodeCount} nodes, training accuracy ` +
      `${(100 * stats.trainingAccuracy).toFixed(1)}%`;
  } catch (err) {
    if (err instanceof ApiError && err.status === 404) {
      statsSlot.textContent = "no model trained yet";
    } else {
      throw err;
    }
  }
  panel.append(statsSlot);

  const { logs } = await client.corpus();
  const retrain = el("button", "", "retrain (hybrid)") as HTMLButtonElement;
  retrain.disabled = logs.length === 0;
  retrain.onclick = async () => {
    retrain.disabled = true;
    retrain.textContent = "training...";
    try {
      const stats = await client.retrain("hybrid");
      statsSlot.textContent =
        `model: ${stats.variant}, ${stats.exampleCount} examples, ` +
        `training accuracy ${(100 * stats.trainingAccuracy).toFixed(1)}%`;
    } finally {
      retrain.disabled = false;
      retrain.textContent = "retrain (hybrid)";
    }
  };
  panel.append(retrain);

  const table = el("table", "corpusTable");
  const head = el("tr");
  for (const title of ["log", "sentence", "actions", "confirmed/total"]) {
    head.append(el("th", "", title));
  }
  table.append(head);
  for (const log of logs) {
    const tr = el("tr");
    tr.append(el("td", "", log.id));
    tr.append(el("td", "", log.sentence));
    tr.append(el("td", "", String(log.actionCount)));
    tr.append(el("td", "", ratioLabel(log.confirms, log.overrides)));
    table.append(tr);
  }
  if (logs.length === 0) {
    panel.append(el("div", "muted", "corpus is empty; finish a session to add a log"));
  }
  panel.append(table);
  return panel;
}
