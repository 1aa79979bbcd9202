// Wire types for the REST API.

export type WireLevel = "hnr" | "nr" | "r" | "hr";

export const WIRE_LEVELS: readonly WireLevel[] = ["hnr", "nr", "r", "hr"];

export const LEVEL_LABELS: Record<WireLevel, string> = {
  hnr: "Highly Not Recommended",
  nr: "Not Recommended",
  r: "Recommended",
  hr: "Highly Recommended",
};

export type Points = Record<WireLevel, number>;

export interface ProjectSummary {
  project_id: string;
  title: string;
  description: string;
  categories: string[];
  funding_goal: number;
  state: "pending_approval" | "under_evaluation" | "decided";
  opened_at?: string;
  closes_at?: string;
  badge?: string;
}

export interface QueueEntry {
  project_id: string;
  title: string;
  categories: string[];
  closes_at: string;
  notified_at: string;
}

export interface DecisionOutcomePayload {
  kind: "recommended" | "insufficient_participation";
  level: WireLevel | null;
  tie_applied: boolean;
  vote_count: number;
  total_weight: number;
}

export interface DecisionPayload {
  project_id: string;
  status: "decided" | "under_evaluation" | "pending_approval";
  closes_at?: string;
  badge?: string;
  outcome?: DecisionOutcomePayload;
  shares?: Points;
  vote_count?: number;
  decided_at?: string;
  comments?: string[];
}

export interface VoteEcho {
  project_id: string;
  points: Points;
  comment: string | null;
  submitted_at: string;
}

export interface SweepResult {
  decided: Array<{
    project_id: string;
    kind: string;
    level: WireLevel | null;
    badge: string;
  }>;
}
