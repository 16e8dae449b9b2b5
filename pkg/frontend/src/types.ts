/** Shared wire types mirroring the backend API payloads. */

export interface ObservedVariables {
  posture: 'standing' | 'sitting';
  eyes: 'open' | 'closed';
  arms_extended: boolean;
  left_arm_pos: string;
  left_arm_elevation: number;
  right_arm_pos: string;
  right_arm_elevation: number;
  head: string;
}

export interface AgentTurn {
  agent: 'patient' | 'tutor';
  action: { function: string; args: Record<string, unknown> } | null;
  say_text: string | null;
}

export interface SessionState {
  session_state: 'active' | 'ended';
  task_description: string;
  observed: ObservedVariables;
}

export interface VerdictPayload {
  item_id: string;
  completed: boolean;
  justification: string;
}

export interface ScoreReportPayload {
  verdicts: VerdictPayload[];
  total: number;
  max: number;
}

export interface ScenarioSummary {
  id: string;
  title: string;
  category: string;
}
