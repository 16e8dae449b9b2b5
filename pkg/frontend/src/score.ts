/**
 * Score report presentation: one row per checklist item with a check or
 * cross mark and an expandable justification, plus button gating so the
 * report can only be requested after the encounter has ended.
 */

import type { ScoreReportPayload, VerdictPayload } from './types.js';

export interface ScoreRow {
  itemId: string;
  mark: string;
  rowClass: string;
  justification: string;
}

export function verdictRow(verdict: VerdictPayload): ScoreRow {
  return {
    itemId: verdict.item_id,
    mark: verdict.completed ? '✓' : '✗',
    rowClass: verdict.completed ? 'verdict verdict-completed' : 'verdict verdict-missed',
    justification: verdict.justification,
  };
}

export function scoreRows(report: ScoreReportPayload): ScoreRow[] {
  return report.verdicts.map(verdictRow);
}

export function scoreHeadline(report: ScoreReportPayload): string {
  return `Score: ${report.total} / ${report.max}`;
}

/** Scoring is only available once the session has been ended. */
export function canScore(sessionState: 'active' | 'ended'): boolean {
  return sessionState === 'ended';
}

export function renderScoreHtml(report: ScoreReportPayload): string {
  const rows = scoreRows(report)
    .map(
      (row) =>
        `<details class="${row.rowClass}"><summary>` +
        `<span class="mark">${row.mark}</span> ${row.itemId}</summary>` +
        `<p>${escapeHtml(row.justification)}</p></details>`,
    )
    .join('');
  return `<h2>${scoreHeadline(report)}</h2>${rows}`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}
