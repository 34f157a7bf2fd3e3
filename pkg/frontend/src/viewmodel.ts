/**
 * Pure helpers turning service payloads into display rows.  Kept free of
 * DOM so they stay unit-testable; the DOM layer lives in app.ts.
 */
import type { ElementView, FrameView, SessionView, TraceStep } from "./api.js";
import type { PathSpec } from "./palette.js";

/** State position of a stack element: the top (last) is -1. */
export function stackPosition(index: number, stackSize: number): number {
  return index - stackSize;
}

/** State position of an input element: the front (first) is +1. */
export function inputPosition(index: number): number {
  return index + 1;
}

export interface TreeRow {
  depth: number;
  label: string;
  path: PathSpec;
}

/**
 * Flatten a frame into indented rows; each row carries the tree path a
 * click should insert into the action draft.
 */
export function frameRows(frame: FrameView, anchor: number): TreeRow[] {
  const rows: TreeRow[] = [];
  const walk = (f: FrameView, roles: string[] | null, steps: string[], depth: number) => {
    const role = roles ? `(${roles.join(" ")}) ` : "";
    const sem = f.sem !== "UNAVAILABLE" ? `/${f.sem}` : "";
    const surface = f.surface === "" ? "(empty)" : `"${f.surface}"`;
    rows.push({
      depth,
      label: `${role}${surface} ${f.synt}${sem}`,
      path: { anchor, steps: [...steps] },
    });
    for (const sub of f.subs) {
      walk(sub.child, sub.roles, [...steps, sub.roles[0]], depth + 1);
    }
  };
  walk(frame, null, [], 0);
  return rows;
}

export function elementTitle(el: ElementView): string {
  if (el.kind === "unit") {
    const alts = el.alternatives.map((a) => a.synt).join(" | ");
    return `"${el.surface}" [${alts}]`;
  }
  return `"${el.surface}" ${el.synt}`;
}

export function traceLine(step: TraceStep, features: string[]): string {
  switch (step.type) {
    case "split": {
      const f = features[step.feature as number] ?? `#${step.feature}`;
      const suffix = step.default ? " (default branch)" : "";
      return `${f} = ${step.value}${suffix}`;
    }
    case "leaf":
      return `leaf: ${step.action} (support ${step.support})`;
    case "class":
      return `action class: ${step.label}`;
    case "gate":
      return `group ${step.group}: ${step.result ? "yes" : "no"}`;
    case "rule":
      return step.index === null
        ? `default rule: ${step.action}`
        : `rule ${step.index}: ${step.action}`;
    default:
      return JSON.stringify(step);
  }
}

export function ratioLabel(confirms?: number, overrides?: number): string {
  if (confirms === undefined || overrides === undefined) {
    return "-";
  }
  const total = confirms + overrides;
  if (total === 0) {
    return "0/0";
  }
  const pct = ((100 * confirms) / total).toFixed(0);
  return `${confirms}/${total} (${pct}% confirmed)`;
}

export function sessionSummary(view: SessionView): string {
  const state = view.done ? "complete" : `${view.input.length} input left`;
  return `${view.sentence} — ${state}, ${view.confirms} confirmed / ${view.overrides} overruled`;
}
