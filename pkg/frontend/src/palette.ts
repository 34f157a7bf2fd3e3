/**
 * Action palette: builds canonically formatted action text from template
 * arguments, so hand-typing role chains is never required.  Every string
 * emitted here must parse on the service without a 422.
 */

export interface PathSpec {
  /** Signed state position: -1 is the stack top, +1 the input front. */
  anchor: number;
  /** Syntactic roles to descend through, outermost first. */
  steps: string[];
}

export function pathText(path: PathSpec): string {
  return [...path.steps.map((s) => s.toUpperCase()), String(path.anchor)].join(" OF ");
}

function categoryToken(category: string): string {
  const up = category.toUpperCase();
  return up.startsWith("S-") ? up.slice(2) : up;
}

function roleList(roles: string[]): string {
  const up = roles.map((r) => r.toUpperCase());
  return up.length === 1 ? up[0] : `(${up.join(" ")})`;
}

export function shift(posChoice?: string): string {
  return posChoice ? `(S ${categoryToken(posChoice)})` : "(S)";
}

export function shiftBack(): string {
  return "(S-BACK)";
}

/** roleAssignments run bottom-to-top over the consumed stack frames. */
export function reduce(count: number, target: string, roleAssignments: string[][]): string {
  const parts = roleAssignments.map(roleList).join(" ");
  return `(R ${count} TO ${categoryToken(target)} AS ${parts})`;
}

export function addInto(source: number, dest: PathSpec, roles: string[]): string {
  const up = roles.map((r) => r.toUpperCase()).join(" ");
  return `(A ${source} TO ${pathText(dest)} AS ${up})`;
}

export function mark(path: PathSpec, slot: string, value: string): string {
  return `(M ${pathText(path)} ${slot.toUpperCase()} ${value.toUpperCase()})`;
}

export function introEmpty(kind: "PRO" | "TRACE", coref: PathSpec): string {
  return `(E ${kind} ${pathText(coref)})`;
}

export function done(): string {
  return "(DONE)";
}

/** One sample instantiation per action variant, for the contract test. */
export function sampleActions(): string[] {
  return [
    shift(),
    shift("S-NOUN"),
    shiftBack(),
    reduce(2, "S-VP", [["PRED"], ["OBJ", "PAT"]]),
    reduce(1, "NP", [["PRED"]]),
    addInto(-1, { anchor: -2, steps: [] }, ["DUMMY"]),
    addInto(-1, { anchor: -2, steps: ["OBJ"] }, ["MOD", "ATTR"]),
    mark({ anchor: -1, steps: [] }, "NUMBER", "PLUR"),
    mark({ anchor: -1, steps: ["SUBJ"] }, "NOTE", "X1"),
    introEmpty("PRO", { anchor: -4, steps: [] }),
    introEmpty("TRACE", { anchor: -1, steps: ["OBJ"] }),
    done(),
  ];
}
