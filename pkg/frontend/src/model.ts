/** Payload shapes of the session service. The UI never derives categories
 * itself; everything rendered comes from these documents. */

export interface UnitView {
  candidates: string[];
  resolved: boolean;
  category: string | null;
  conflict: boolean;
  seeded: "seed" | "manual" | null;
  tier: "definite" | "possible" | "none" | null;
}

export interface StateView {
  categories: string[];
  specific: string[];
  iteration: number;
  units: Record<string, UnitView>;
  conflicts: string[];
  diff: DiffMap;
}

export type DiffMap = Record<string, { before: string[]; after: string[] }>;

export interface NarrowingStepDoc {
  unit: string;
  removed: string[];
  direction: "seed" | "outgoing_constraint" | "incoming_constraint";
  neighbor: string | null;
  neighbor_candidates: string[] | null;
  edge: { from: string; to: string; kind: string } | null;
}

export interface PropagationReportDoc {
  iteration: number;
  fixpoint_already_reached: boolean;
  diff: DiffMap;
  newly_resolved: string[];
  newly_conflicted: string[];
  steps: NarrowingStepDoc[];
}

export interface PropagateResponse {
  report: PropagationReportDoc;
  state: StateView;
}

export interface CandidateEntryDoc {
  unit: string;
  candidates: string[];
  resolved: boolean;
  category: string | null;
}

export interface CandidatesDoc {
  specific: string[];
  definite: CandidateEntryDoc[];
  possible: CandidateEntryDoc[];
  none: CandidateEntryDoc[];
}

export interface GraphUnitDoc {
  id: string;
  simple_name: string;
  kind: "class" | "interface";
  location: string | null;
  external: boolean;
}

export interface GraphEdgeDoc {
  from: string;
  to: string;
  kind: string;
  location: string | null;
}

export interface GraphDoc {
  units: GraphUnitDoc[];
  edges: GraphEdgeDoc[];
}

export interface SessionInputs {
  categories: unknown;
  graph: GraphDoc;
  seeds: unknown;
}

export interface CreateResponse {
  id: string;
  state: StateView;
}

export interface ErrorBody {
  error: string;
  detail: string;
  candidates?: string[];
  missing?: string[];
}
