/** DOM glue: wires the service client and the pure render functions.
 *
 * All mutations await server confirmation and then re-render from the
 * response payloads; node positions are the only client-side state that
 * survives a render (layout seed + drags).
 */

import { ApiError, SessionApi } from "./api.js";
import { computeLayout, type Point } from "./layout.js";
import type {
  CandidatesDoc,
  GraphDoc,
  PropagationReportDoc,
  StateView,
} from "./model.js";
import {
  candidateRows,
  categoryColors,
  diffRows,
  nodeViewModels,
  pickerOptions,
  renderCandidatePanel,
  renderDiffPanel,
  renderGraphSvg,
  renderLegend,
  renderPicker,
} from "./render.js";

const WIDTH = 900;
const HEIGHT = 560;

interface AppState {
  sessionId: string | null;
  state: StateView | null;
  graph: GraphDoc | null;
  lastReport: PropagationReportDoc | null;
  candidates: CandidatesDoc | null;
  positions: Map<string, Point>;
  selected: string | null;
}

const app: AppState = {
  sessionId: null,
  state: null,
  graph: null,
  lastReport: null,
  candidates: null,
  positions: new Map(),
  selected: null,
};

const api = new SessionApi("");

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function banner(message: string | null, isError = true): void {
  const box = el<HTMLDivElement>("banner");
  if (message === null) {
    box.hidden = true;
    return;
  }
  box.hidden = false;
  box.textContent = message;
  box.className = isError ? "banner error" : "banner info";
}

async function guard<T>(work: () => Promise<T>): Promise<T | null> {
  try {
    banner(null);
    return await work();
  } catch (err) {
    if (err instanceof ApiError) {
      const extra = err.body.candidates
        ? ` Remaining candidates: {${err.body.candidates.join(", ")}}.`
        : "";
      banner(`${err.body.error}: ${err.body.detail}${extra}`);
    } else {
      banner(`Connection problem: ${String(err)}`);
    }
    return null;
  }
}

function changedUnits(): Set<string> {
  return new Set(Object.keys(app.state?.diff ?? {}));
}

function render(): void {
  const state = app.state;
  if (!state || !app.graph) return;
  const colors = categoryColors(state.categories);
  const nodes = nodeViewModels(state, colors, changedUnits());
  el("canvas").innerHTML = renderGraphSvg(
    nodes, app.graph, app.positions, WIDTH, HEIGHT, app.selected,
  );
  el("legend-box").innerHTML = renderLegend(state.categories, colors, state.specific);
  el("diff-box").innerHTML = renderDiffPanel(
    diffRows(state.diff, app.lastReport?.steps ?? []),
  );
  el("candidates-box").innerHTML = app.candidates
    ? renderCandidatePanel(candidateRows(app.candidates))
    : `<p class="notice">Run a round to rank candidates.</p>`;
  el("picker-box").innerHTML = renderPicker(
    app.selected, app.selected ? pickerOptions(state, app.selected) : [],
  );
  el("iteration").textContent = `iteration ${state.iteration}`;
  const conflictCount = state.conflicts.length;
  el("conflicts").textContent = conflictCount
    ? `${conflictCount} conflict(s): ${state.conflicts.join(", ")}`
    : "";
  attachCanvasHandlers();
}

function attachCanvasHandlers(): void {
  const svg = el("canvas").querySelector("svg");
  if (!svg) return;
  svg.querySelectorAll<SVGGElement>("g.node").forEach((group) => {
    const unit = group.dataset.unit!;
    group.addEventListener("click", () => {
      app.selected = unit === app.selected ? null : unit;
      render();
    });
    group.addEventListener("mousedown", (down) => {
      down.preventDefault();
      const rect = svg.getBoundingClientRect();
      const scaleX = WIDTH / rect.width;
      const scaleY = HEIGHT / rect.height;
      const move = (ev: MouseEvent) => {
        app.positions.set(unit, {
          x: (ev.clientX - rect.left) * scaleX,
          y: (ev.clientY - rect.top) * scaleY,
        });
        render();
      };
      const up = () => {
        window.removeEventListener("mousemove", move);
        window.removeEventListener("mouseup", up);
      };
      window.addEventListener("mousemove", move);
      window.addEventListener("mouseup", up);
    });
  });
}

async function refreshCandidates(): Promise<void> {
  if (!app.sessionId) return;
  try {
    app.candidates = await api.candidates(app.sessionId);
  } catch {
    app.candidates = null; // e.g. lattice without specific categories
  }
}

async function loadSession(id: string): Promise<void> {
  const result = await guard(async () => {
    const state = await api.getState(id);
    const exported = await api.exportDoc(id);
    return { state, graph: exported.graph };
  });
  if (!result) return;
  app.sessionId = id;
  app.state = result.state;
  app.graph = result.graph;
  app.lastReport = null;
  app.selected = null;
  app.positions = computeLayout(
    Object.keys(result.state.units).sort(),
    result.graph.edges,
    WIDTH,
    HEIGHT,
  );
  await refreshCandidates();
  el<HTMLInputElement>("session-id").value = id;
  if (Object.keys(result.state.units).length === 0) {
    banner("Session loaded, but the graph has no units.", false);
  }
  render();
}

async function createSession(): Promise<void> {
  const parse = (id: string) => JSON.parse(el<HTMLTextAreaElement>(id).value);
  let inputs;
  try {
    inputs = {
      categories: parse("input-categories"),
      graph: parse("input-graph"),
      seeds: parse("input-seeds"),
    };
  } catch (err) {
    banner(`Input is not valid JSON: ${String(err)}`);
    return;
  }
  const created = await guard(() => api.createSession(inputs));
  if (created) {
    await loadSession(created.id);
  }
}

async function runRound(): Promise<void> {
  if (!app.sessionId) return;
  const response = await guard(() => api.propagate(app.sessionId!));
  if (!response) return;
  app.lastReport = response.report;
  app.state = response.state;
  await refreshCandidates();
  render();
  if (response.report.fixpoint_already_reached) {
    banner("Fixpoint already reached: nothing changed.", false);
  }
}

async function assignSelected(): Promise<void> {
  if (!app.sessionId || !app.selected || !app.state) return;
  const picker = document.getElementById("category-picker") as HTMLSelectElement | null;
  const category = picker?.value;
  if (!category) {
    banner("Pick a category first.");
    return;
  }
  const force = el<HTMLInputElement>("force-toggle").checked;
  const state = await guard(() =>
    api.assign(app.sessionId!, app.selected!, category, force),
  );
  if (!state) return;
  app.state = state;
  await refreshCandidates();
  render();
  if (el<HTMLInputElement>("auto-propagate").checked) {
    await runRound();
  }
}

async function undo(): Promise<void> {
  if (!app.sessionId) return;
  const state = await guard(() => api.undo(app.sessionId!));
  if (!state) return;
  app.state = state;
  app.lastReport = null;
  await refreshCandidates();
  render();
}

export function bootstrap(): void {
  el("create-btn").addEventListener("click", () => void createSession());
  el("load-btn").addEventListener("click", () => {
    const id = el<HTMLInputElement>("session-id").value.trim();
    if (id) void loadSession(id);
  });
  el("propagate-btn").addEventListener("click", () => void runRound());
  el("assign-btn").addEventListener("click", () => void assignSelected());
  el("undo-btn").addEventListener("click", () => void undo());
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  bootstrap();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", bootstrap);
}
