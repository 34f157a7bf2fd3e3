/**
 * Console page wiring.  Hash routes: #/ (dashboard + new session) and
 * #/session/<id> (the acquisition view).  The page re-renders from a
 * fresh GET after every mutation, so a reload always reproduces the view.
 */
import { ApiError, Client, SessionView } from "./api.js";
import * as palette from "./palette.js";
import { renderDashboard } from "./dashboard.js";
import { elementTitle, frameRows, inputPosition, stackPosition, traceLine } from "./viewmodel.js";

const client = new Client("");
const root = () => document.getElementById("app")!;

function el(tag: string, cls?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function errorBanner(err: unknown): HTMLElement {
  const message = err instanceof ApiError ? `${err.body.code}: ${err.body.message}`
    : err instanceof Error ? err.message : String(err);
  return el("div", "error", message);
}

// ---------------------------------------------------------------------------
// home view

async function showHome() {
  const page = el("div");
  const form = el("div", "newSession");
  const input = el("input") as HTMLInputElement;
  input.placeholder = "Sentence to annotate, e.g.  John bought a book.";
  input.size = 60;
  const button = el("button", "", "Start session") as HTMLButtonElement;
  button.onclick = async () => {
    if (!input.value.trim()) return;
    try {
      const view = await client.createSession(input.value);
      location.hash = `#/session/${view.id}`;
    } catch (err) {
      form.append(errorBanner(err));
    }
  };
  form.append(input, button);
  page.append(el("h1", "", "parsebench console"), form);
  page.append(await renderDashboard(client));
  root().replaceChildren(page);
}

// ---------------------------------------------------------------------------
// session view

let draftInsert: ((text: string) => void) | null = null;

function treePanel(title: string, views: SessionView["stack"], positions: number[]): HTMLElement {
  const panel = el("div", "panel");
  panel.append(el("h3", "", title));
  views.forEach((element, i) => {
    const box = el("div", "element");
    const pos = positions[i];
    box.append(el("div", "pos", `${pos > 0 ? "+" : ""}${pos}`));
    if (element.kind === "unit") {
      box.append(el("div", "unit", elementTitle(element)));
    } else {
      for (const row of frameRows(element, pos)) {
        const line = el("div", "node", row.label);
        line.style.paddingLeft = `${row.depth}em`;
        line.title = "click to insert path: " + palette.pathText(row.path);
        line.onclick = () => draftInsert && draftInsert(palette.pathText(row.path));
        box.append(line);
      }
    }
    panel.append(box);
  });
  return panel;
}

function paletteBar(onEmit: (action: string) => void, sessionDone: boolean): HTMLElement {
  const bar = el("div", "palette");
  const mk = (label: string, build: () => string | null) => {
    const b = el("button", "", label) as HTMLButtonElement;
    b.disabled = sessionDone;
    b.onclick = () => {
      const action = build();
      if (action) onEmit(action);
    };
    bar.append(b);
  };
  mk("shift", () => {
    const pos = prompt("Part-of-speech choice (empty for first reading):", "");
    if (pos === null) return null;
    return palette.shift(pos.trim() || undefined);
  });
  mk("shift back", () => palette.shiftBack());
  mk("reduce", () => {
    const count = Number(prompt("How many stack frames?", "2"));
    if (!count) return null;
    const target = prompt("Target category (e.g. NP, VP, SNT):", "NP");
    if (!target) return null;
    const lists: string[][] = [];
    for (let i = 0; i < count; i++) {
      const roles = prompt(`Roles for frame ${i + 1} of ${count}, bottom first (space separated):`,
        i === count - 1 ? "PRED" : "MOD");
      if (!roles) return null;
      lists.push(roles.trim().split(/\s+/));
    }
    return palette.reduce(count, target, lists);
  });
  mk("add into", () => {
    const source = Number(prompt("Source position (e.g. -1):", "-1"));
    const dest = prompt("Destination path (click a node first, e.g. OBJ OF -2):", "-2");
    const roles = prompt("Roles (space separated):", "MOD");
    if (!source || !dest || !roles) return null;
    return `(A ${source} TO ${dest.trim().toUpperCase()} AS ${roles.trim().toUpperCase()})`;
  });
  mk("mark", () => {
    const path = prompt("Path (e.g. -1 or SUBJ OF -1):", "-1");
    const slot = prompt("Slot (PERSON/NUMBER/TENSE or extra key):", "NUMBER");
    const value = prompt("Value:", "PLUR");
    if (!path || !slot || !value) return null;
    return `(M ${path.trim().toUpperCase()} ${slot.toUpperCase()} ${value.toUpperCase()})`;
  });
  mk("empty category", () => {
    const kind = prompt("Kind (PRO or TRACE):", "PRO");
    const coref = prompt("Coreferent path:", "-1");
    if (!kind || !coref) return null;
    return `(E ${kind.toUpperCase()} ${coref.trim().toUpperCase()})`;
  });
  mk("done", () => palette.done());
  return bar;
}

async function showSession(id: string) {
  let view: SessionView;
  try {
    view = await client.getSession(id);
  } catch (err) {
    root().replaceChildren(errorBanner(err), backLink());
    return;
  }
  renderSession(view);
}

function backLink(): HTMLElement {
  const a = el("a", "back", "< dashboard") as HTMLAnchorElement;
  a.href = "#/";
  return a;
}

function renderSession(view: SessionView) {
  const page = el("div");
  page.append(backLink());
  page.append(el("h2", "", `"${view.sentence}"`));
  page.append(el("div", "counter",
    `${view.confirms} confirmed / ${view.overrides} overruled`));

  const banner = el("div", "proposal");
  if (view.done) {
    banner.append(el("span", "doneMark", "parse complete, ready to finish"));
  } else if (view.proposal) {
    banner.append(el("span", "", "proposal: "));
    banner.append(el("code", "", view.proposal));
    const confirm = el("button", "confirm", "CONFIRM (Enter)") as HTMLButtonElement;
    confirm.onclick = () => submit("CONFIRM");
    banner.append(confirm);
  } else {
    banner.append(el("span", "muted", "no model proposal; enter an action"));
  }
  page.append(banner);

  const columns = el("div", "columns");
  // stack grows to the right: its top is the rightmost, marked -1
  const stackPositions = view.stack.map((_, i) => stackPosition(i, view.stack.length));
  const stackPanel = treePanel("parse stack (top at right end)", view.stack, stackPositions);
  stackPanel.classList.add("stack");
  const inputPanel = treePanel("input list", view.input,
    view.input.map((_, i) => inputPosition(i)));
  columns.append(stackPanel, inputPanel);
  page.append(columns);

  const draftBox = el("div", "draft");
  const draft = el("input") as HTMLInputElement;
  draft.size = 70;
  draft.placeholder = "action text, e.g. (R 2 TO VP AS PRED (OBJ PAT))";
  draftInsert = (text) => {
    draft.value = draft.value ? `${draft.value} ${text}` : text;
    draft.focus();
  };
  const errSlot = el("div");

  const submit = async (action: string) => {
    errSlot.replaceChildren();
    try {
      const next = await client.postAction(view.id, action);
      renderSession(next);
    } catch (err) {
      // a 422 keeps the draft so it can be corrected in place
      errSlot.replaceChildren(errorBanner(err));
    }
  };

  const send = el("button", "", "apply") as HTMLButtonElement;
  send.onclick = () => draft.value.trim() && submit(draft.value.trim());
  draft.onkeydown = (ev) => {
    if (ev.key === "Enter" && draft.value.trim()) {
      ev.preventDefault();
      submit(draft.value.trim());
    }
  };
  const undoButton = el("button", "", "undo") as HTMLButtonElement;
  undoButton.onclick = async () => {
    errSlot.replaceChildren();
    try {
      renderSession(await client.undo(view.id));
    } catch (err) {
      errSlot.replaceChildren(errorBanner(err));
    }
  };
  const finishButton = el("button", "", "finish -> log") as HTMLButtonElement;
  finishButton.disabled = !view.done;
  finishButton.onclick = async () => {
    try {
      const result = await client.finish(view.id);
      alert(`log written: ${result.log}`);
      location.hash = "#/";
    } catch (err) {
      errSlot.replaceChildren(errorBanner(err));
    }
  };
  draftBox.append(draft, send, undoButton, finishButton);
  page.append(draftBox, errSlot);
  page.append(paletteBar((action) => submit(action), view.done));

  // confirm on bare Enter anywhere outside the draft input
  document.onkeydown = (ev) => {
    if (ev.key === "Enter" && document.activeElement !== draft
        && view.proposal && !view.done) {
      submit("CONFIRM");
    }
  };

  const insight = el("div", "columns");
  const tracePanel = el("div", "panel trace");
  tracePanel.append(el("h3", "", "decision trace"));
  const featureTexts = view.featureVector.map((fv) => fv.feature);
  for (const step of view.trace) {
    tracePanel.append(el("div", "node", traceLine(step, featureTexts)));
  }
  const vectorPanel = el("div", "panel vector");
  vectorPanel.append(el("h3", "", "feature vector"));
  const table = el("table");
  for (const { feature, value } of view.featureVector) {
    const tr = el("tr");
    tr.append(el("td", "feat", feature), el("td", "val", value));
    table.append(tr);
  }
  vectorPanel.append(table);
  insight.append(tracePanel, vectorPanel);
  page.append(insight);

  const historyPanel = el("div", "panel");
  historyPanel.append(el("h3", "", "history"));
  view.history.forEach((h, i) => {
    historyPanel.append(el("div", "node", `${i + 1}. ${h.action} [${h.kind}]`));
  });
  page.append(historyPanel);

  root().replaceChildren(page);
}

// ---------------------------------------------------------------------------
// routing

async function route() {
  document.onkeydown = null;
  const hash = location.hash || "#/";
  const match = hash.match(/^#\/session\/(.+)$/);
  if (match) {
    await showSession(match[1]);
  } else {
    await showHome();
  }
}

window.addEventListener("hashchange", route);
window.addEventListener("load", route);
