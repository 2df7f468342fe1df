/** Pure mapping from service payloads to view models and markup strings.
 *
 * Everything here is a function of the latest server payloads; there is no
 * client-side category inference. The app module only glues these strings
 * into the DOM, which keeps the whole mapping snapshot-testable.
 */

import type {
  CandidatesDoc,
  DiffMap,
  GraphDoc,
  NarrowingStepDoc,
  StateView,
} from "./model.js";
import type { Point } from "./layout.js";

const PALETTE = [
  "#8c8c74", // root-ish: muted
  "#4c78a8",
  "#e45756",
  "#72b7b2",
  "#eeca3b",
  "#b279a2",
  "#f58518",
  "#54a24b",
];

const AMBIGUOUS_FILL = "#d9d9d9";
const CONFLICT_FILL = "#b30000";

export function categoryColors(categories: string[]): Map<string, string> {
  return new Map(categories.map((c, i) => [c, PALETTE[i % PALETTE.length]]));
}

export interface NodeViewModel {
  id: string;
  name: string;
  label: string;
  fill: string;
  textColor: string;
  ambiguous: boolean;
  conflict: boolean;
  resolved: boolean;
  seeded: "seed" | "manual" | null;
  changed: boolean;
}

export function simpleName(unitId: string): string {
  const parts = unitId.split(".");
  return parts[parts.length - 1];
}

/** `Name (Category)` when resolved, `Name (n?)` while ambiguous, `Name (!)`
 * on conflict; colors follow the category legend. */
export function nodeViewModels(
  state: StateView,
  colors: Map<string, string>,
  changedUnits: Set<string> = new Set(),
): NodeViewModel[] {
  return Object.keys(state.units)
    .sort()
    .map((id) => {
      const unit = state.units[id];
      let label: string;
      let fill: string;
      if (unit.conflict) {
        label = `${simpleName(id)} (!)`;
        fill = CONFLICT_FILL;
      } else if (unit.resolved && unit.category !== null) {
        label = `${simpleName(id)} (${unit.category})`;
        fill = colors.get(unit.category) ?? AMBIGUOUS_FILL;
      } else {
        label = `${simpleName(id)} (${unit.candidates.length}?)`;
        fill = AMBIGUOUS_FILL;
      }
      return {
        id,
        name: simpleName(id),
        label,
        fill,
        textColor: unit.resolved || unit.conflict ? "#ffffff" : "#333333",
        ambiguous: !unit.resolved && !unit.conflict,
        conflict: unit.conflict,
        resolved: unit.resolved,
        seeded: unit.seeded,
        changed: changedUnits.has(id),
      };
    });
}

/** Options the assignment picker may offer: exactly the unit's current
 * candidate set (the force toggle is rendered separately). */
export function pickerOptions(state: StateView, unitId: string): string[] {
  const unit = state.units[unitId];
  return unit ? [...unit.candidates] : [];
}

export function formatSet(categories: string[]): string {
  return `{${categories.join(", ")}}`;
}

export interface DiffRow {
  unit: string;
  before: string;
  after: string;
  causes: string[];
}

function describeStep(step: NarrowingStepDoc): string {
  const removed = formatSet(step.removed);
  if (step.direction === "seed") {
    return `seed removed ${removed}`;
  }
  const edge = step.edge ? `${step.edge.from} -> ${step.edge.to} (${step.edge.kind})` : "";
  const neighborSet = step.neighbor_candidates ? formatSet(step.neighbor_candidates) : "";
  const side = step.direction === "outgoing_constraint" ? "depends on" : "is used by";
  return `removed ${removed}: ${side} ${step.neighbor} ${neighborSet} via ${edge}`;
}

/** One row per narrowed unit, before -> after, with its explanation trail. */
export function diffRows(diff: DiffMap, steps: NarrowingStepDoc[] = []): DiffRow[] {
  return Object.keys(diff)
    .sort()
    .map((unit) => ({
      unit,
      before: formatSet(diff[unit].before),
      after: formatSet(diff[unit].after),
      causes: steps.filter((s) => s.unit === unit).map(describeStep),
    }));
}

export interface CandidateRow {
  unit: string;
  tier: "definite" | "possible";
  shown: string;
}

/** Candidate panel rows, ranked definite first, then possible. */
export function candidateRows(doc: CandidatesDoc): CandidateRow[] {
  const rows: CandidateRow[] = [];
  for (const entry of doc.definite) {
    rows.push({
      unit: entry.unit,
      tier: "definite",
      shown: entry.resolved && entry.category ? entry.category : formatSet(entry.candidates),
    });
  }
  for (const entry of doc.possible) {
    rows.push({
      unit: entry.unit,
      tier: "possible",
      shown: entry.resolved && entry.category ? entry.category : formatSet(entry.candidates),
    });
  }
  return rows;
}

// -- markup -------------------------------------------------------------------

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const EDGE_DASH: Record<string, string> = {
  Inheritance: "",
  Implementation: "6 3",
  Import: "2 3",
  Instantiation: "8 2 2 2",
  ExceptionThrowing: "4 4",
  Usage: "",
  Naming: "1 4",
};

export function renderGraphSvg(
  nodes: NodeViewModel[],
  graph: GraphDoc,
  positions: Map<string, Point>,
  width: number,
  height: number,
  selected: string | null = null,
): string {
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${width} ${height}" xmlns="http://www.w3.org/2000/svg" role="img">`,
  );
  parts.push(
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="22" refY="5" ` +
      `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
      `<path d="M 0 0 L 10 5 L 0 10 z" fill="#999"/></marker></defs>`,
  );
  for (const edge of graph.edges) {
    const a = positions.get(edge.from);
    const b = positions.get(edge.to);
    if (!a || !b || edge.from === edge.to) continue;
    const dash = EDGE_DASH[edge.kind] ?? "";
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    parts.push(
      `<line class="edge edge-${edge.kind}" x1="${a.x}" y1="${a.y}" ` +
        `x2="${b.x}" y2="${b.y}" stroke="#999" stroke-width="1.2"${dashAttr} ` +
        `marker-end="url(#arrow)"><title>${escapeHtml(
          `${edge.from} -> ${edge.to} (${edge.kind})`,
        )}</title></line>`,
    );
  }
  for (const node of nodes) {
    const p = positions.get(node.id);
    if (!p) continue;
    const classes = ["node"];
    if (node.ambiguous) classes.push("ambiguous");
    if (node.conflict) classes.push("conflict");
    if (node.changed) classes.push("pulse");
    if (node.id === selected) classes.push("selected");
    const stroke = node.id === selected ? "#1a1a1a" : "#666";
    parts.push(
      `<g class="${classes.join(" ")}" data-unit="${escapeHtml(node.id)}" ` +
        `transform="translate(${p.x},${p.y})">` +
        `<circle r="17" fill="${node.fill}" stroke="${stroke}" stroke-width="1.5"/>` +
        (node.conflict
          ? `<text class="marker" y="5" text-anchor="middle" fill="#fff">!</text>`
          : node.ambiguous
            ? `<text class="marker" y="5" text-anchor="middle" fill="#333">?</text>`
            : "") +
        `<text class="nodelabel" y="32" text-anchor="middle" fill="#222">` +
        `${escapeHtml(node.label)}</text>` +
        `<title>${escapeHtml(node.id)}</title></g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

export function renderLegend(
  categories: string[],
  colors: Map<string, string>,
  specific: string[],
): string {
  const items = categories
    .map((c) => {
      const star = specific.includes(c) ? " *" : "";
      return (
        `<li><span class="swatch" style="background:${colors.get(c)}"></span>` +
        `${escapeHtml(c)}${star}</li>`
      );
    })
    .join("");
  return (
    `<ul class="legend">${items}` +
    `<li><span class="swatch ambiguous-swatch"></span>uncategorized (?)</li>` +
    `<li><span class="swatch conflict-swatch"></span>conflict (!)</li></ul>`
  );
}

export function renderDiffPanel(rows: DiffRow[]): string {
  if (rows.length === 0) {
    return `<p class="notice">Fixpoint reached: no set changed in the last round.</p>`;
  }
  const items = rows
    .map((row) => {
      const causes = row.causes.length
        ? `<details><summary>why</summary><ul>` +
          row.causes.map((c) => `<li>${escapeHtml(c)}</li>`).join("") +
          `</ul></details>`
        : "";
      return (
        `<li class="diff-row" data-unit="${escapeHtml(row.unit)}">` +
        `<strong>${escapeHtml(row.unit)}</strong>: ` +
        `${escapeHtml(row.before)} &rarr; ${escapeHtml(row.after)}${causes}</li>`
      );
    })
    .join("");
  return `<ul class="diff">${items}</ul>`;
}

export function renderCandidatePanel(rows: CandidateRow[]): string {
  if (rows.length === 0) {
    return `<p class="notice">No generation candidates.</p>`;
  }
  const items = rows
    .map(
      (row) =>
        `<li class="cand ${row.tier}" data-unit="${escapeHtml(row.unit)}">` +
        `<span class="tier">${row.tier}</span> ${escapeHtml(row.unit)} ` +
        `(${escapeHtml(row.shown)})</li>`,
    )
    .join("");
  return `<ol class="candidates">${items}</ol>`;
}

export function renderPicker(unitId: string | null, options: string[]): string {
  if (unitId === null) {
    return `<p class="notice">Select a node to assign a category.</p>`;
  }
  if (options.length === 0) {
    return (
      `<p class="notice">${escapeHtml(unitId)} is conflicted; ` +
      `use force to reseed it.</p>` +
      `<select id="category-picker"></select>`
    );
  }
  const opts = options
    .map((c) => `<option value="${escapeHtml(c)}">${escapeHtml(c)}</option>`)
    .join("");
  return `<select id="category-picker">${opts}</select>`;
}
