/** Payload -> view-model -> markup mapping, against recorded service
 * payloads for the canonical ten-unit session. */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { computeLayout } from "../src/layout.js";
import type {
  CandidatesDoc,
  ErrorBody,
  GraphDoc,
  PropagateResponse,
  StateView,
} from "../src/model.js";
import {
  candidateRows,
  categoryColors,
  diffRows,
  formatSet,
  nodeViewModels,
  pickerOptions,
  renderCandidatePanel,
  renderDiffPanel,
  renderGraphSvg,
  renderLegend,
  renderPicker,
} from "../src/render.js";

function fixture<T>(name: string): T {
  const path = join(__dirname, "fixtures", name);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

const initialState = fixture<StateView>("state_initial.json");
const round1 = fixture<PropagateResponse>("propagate_round1.json");
const round2 = fixture<PropagateResponse>("propagate_round2.json");
const candidates1 = fixture<CandidatesDoc>("candidates_round1.json");
const rejected = fixture<ErrorBody>("assign_reader_rejected.json");
const graph = fixture<GraphDoc>("graph.json");

describe("initial session view", () => {
  const colors = categoryColors(initialState.categories);
  const nodes = nodeViewModels(initialState, colors);

  it("shows ten nodes, four colored, six with a question mark", () => {
    expect(nodes).toHaveLength(10);
    const colored = nodes.filter((n) => n.resolved);
    const ambiguous = nodes.filter((n) => n.ambiguous);
    expect(colored).toHaveLength(4);
    expect(ambiguous).toHaveLength(6);
    expect(colored.map((n) => n.id).sort()).toEqual([
      "AbstractPanel", "Book", "CookBook", "JPanel",
    ]);
  });

  it("labels resolved nodes with the category and ambiguous ones with the set size", () => {
    const byId = new Map(nodes.map((n) => [n.id, n]));
    expect(byId.get("CookBook")!.label).toBe("CookBook (D)");
    expect(byId.get("Reader")!.label).toBe("Reader (5?)");
  });

  it("snapshot: svg of the initial graph", () => {
    const ids = Object.keys(initialState.units).sort();
    const positions = computeLayout(ids, graph.edges, 900, 560);
    const svg = renderGraphSvg(nodes, graph, positions, 900, 560);
    expect(svg).toMatchSnapshot();
  });

  it("snapshot: legend maps categories to colors and stars specific ones", () => {
    expect(renderLegend(initialState.categories, colors, initialState.specific))
      .toMatchSnapshot();
  });
});

describe("assignment picker", () => {
  it("offers exactly the remaining candidates of Reader after round 1", () => {
    const options = pickerOptions(round1.state, "Reader");
    expect(options).toEqual(["D", "DG", "DT", "T"]);
    expect(options).not.toContain("0'");
  });

  it("renders only candidate options into the select", () => {
    const html = renderPicker("Reader", pickerOptions(round1.state, "Reader"));
    expect(html).toMatchSnapshot();
    expect(html).not.toContain("0&#39;");
  });

  it("shows the remaining candidates when the server rejects with 409", () => {
    expect(rejected.error).toBe("CategoryNotInCandidates");
    expect(rejected.candidates).toEqual(["D", "DG", "DT", "T"]);
  });
});

describe("round diff panel", () => {
  it("lists Author narrowing from the full set to {DG} after round 1", () => {
    const rows = diffRows(round1.report.diff, round1.report.steps);
    const author = rows.find((r) => r.unit === "Author");
    expect(author).toBeDefined();
    expect(author!.before).toBe("{0', D, DG, DT, T}");
    expect(author!.after).toBe("{DG}");
    expect(author!.causes.length).toBeGreaterThan(0);
  });

  it("snapshot: diff panel markup for round 1", () => {
    const rows = diffRows(round1.report.diff, round1.report.steps);
    expect(renderDiffPanel(rows)).toMatchSnapshot();
  });

  it("renders the fixpoint notice when nothing changed", () => {
    expect(renderDiffPanel([])).toContain("Fixpoint reached");
  });
});

describe("round 2 after assigning Reader:T", () => {
  it("turns CookBookReader into a resolved DT node", () => {
    const colors = categoryColors(round2.state.categories);
    const nodes = nodeViewModels(round2.state, colors, new Set(Object.keys(round2.state.diff)));
    const reader = nodes.find((n) => n.id === "CookBookReader")!;
    expect(reader.label).toBe("CookBookReader (DT)");
    expect(reader.resolved).toBe(true);
    expect(reader.fill).toBe(colors.get("DT"));
    expect(reader.changed).toBe(true);
  });
});

describe("candidate panel", () => {
  it("ranks definite entries before possible ones", () => {
    const rows = candidateRows(candidates1);
    const tiers = rows.map((r) => r.tier);
    expect(tiers.lastIndexOf("definite")).toBeLessThan(tiers.indexOf("possible"));
    expect(rows.map((r) => r.unit)).toEqual([
      "CookBook", "CookBookPanel", "CookBookReader",
      "PanelClientOne", "PanelClientTwo", "Reader",
    ]);
  });

  it("snapshot: candidate panel markup", () => {
    expect(renderCandidatePanel(candidateRows(candidates1))).toMatchSnapshot();
  });
});

describe("conflict rendering", () => {
  it("marks conflicted units with a red badge", () => {
    const state: StateView = JSON.parse(JSON.stringify(initialState));
    state.units["Reader"] = {
      ...state.units["Reader"],
      candidates: [],
      resolved: false,
      conflict: true,
      category: null,
    };
    const nodes = nodeViewModels(state, categoryColors(state.categories));
    const reader = nodes.find((n) => n.id === "Reader")!;
    expect(reader.conflict).toBe(true);
    expect(reader.label).toBe("Reader (!)");
    expect(reader.fill).toBe("#b30000");
  });
});

describe("layout", () => {
  it("is deterministic for the same inputs", () => {
    const ids = Object.keys(initialState.units).sort();
    const a = computeLayout(ids, graph.edges, 900, 560);
    const b = computeLayout(ids, graph.edges, 900, 560);
    expect([...a.entries()]).toEqual([...b.entries()]);
  });

  it("keeps every node inside the viewport", () => {
    const ids = Object.keys(initialState.units).sort();
    for (const point of computeLayout(ids, graph.edges, 900, 560).values()) {
      expect(point.x).toBeGreaterThanOrEqual(0);
      expect(point.x).toBeLessThanOrEqual(900);
      expect(point.y).toBeGreaterThanOrEqual(0);
      expect(point.y).toBeLessThanOrEqual(560);
    }
  });
});

describe("set formatting", () => {
  it("wraps categories in braces", () => {
    expect(formatSet(["D", "DT"])).toBe("{D, DT}");
    expect(formatSet([])).toBe("{}");
  });
});
