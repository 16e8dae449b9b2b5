/**
 * Chat transcript model.
 *
 * Entries come from two sources that must agree: optimistic appends when
 * the student sends a message, and rendered log lines replayed from the
 * event stream. Tutor entries carry a distinct color class.
 */

export type Author = 'student' | 'patient' | 'tutor';

export interface ChatEntry {
  author: Author;
  text: string;
}

export const TUTOR_PREFIX = '@tutor';

/** CSS class for a chat bubble; tutor replies are color-coded. */
export function entryClass(author: Author): string {
  return author === 'tutor' ? 'bubble bubble-tutor' : `bubble bubble-${author}`;
}

export function isTutorQuery(text: string): boolean {
  return text.trim().toLowerCase().startsWith(TUTOR_PREFIX);
}

export function canSend(text: string, sessionState: 'active' | 'ended'): boolean {
  return sessionState === 'active' && text.trim().length > 0;
}

const LOG_LINE = /^(action|perception)::([a-z0-9_]+)::([a-z0-9_]+)\((.*)\)$/;
const TEXT_ARG = /text=("(?:[^"\\]|\\.)*")/;

function extractText(args: string): string | null {
  const match = TEXT_ARG.exec(args);
  return match ? (JSON.parse(match[1]) as string) : null;
}

/**
 * Map one rendered log line to a chat entry, or null for non-chat events
 * (movements, manipulations, drift).
 */
export function entryFromLogLine(line: string): ChatEntry | null {
  const match = LOG_LINE.exec(line);
  if (!match) return null;
  const [, namespace, source, fn, args] = match;
  if (namespace === 'perception' && source === 'sensor' && fn === 'text_input') {
    const text = extractText(args);
    return text === null ? null : { author: 'student', text };
  }
  if (namespace === 'perception' && source === 'sensor' && fn === 'tutor_query') {
    const text = extractText(args);
    return text === null ? null : { author: 'student', text: `${TUTOR_PREFIX} ${text}` };
  }
  if (namespace === 'action' && source === 'patient' && fn === 'say') {
    const text = extractText(args);
    return text === null ? null : { author: 'patient', text };
  }
  if (namespace === 'action' && source === 'tutor' && fn === 'say') {
    const text = extractText(args);
    return text === null ? null : { author: 'tutor', text };
  }
  return null;
}

/** Rebuild the full transcript from replayed event-stream lines. */
export function transcriptFromLog(lines: string[]): ChatEntry[] {
  const entries: ChatEntry[] = [];
  for (const line of lines) {
    const entry = entryFromLogLine(line);
    if (entry) entries.push(entry);
  }
  return entries;
}
