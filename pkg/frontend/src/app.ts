/**
 * DOM glue for the training client. All rendering logic lives in the
 * pure modules; this file only wires events, the live stream, and the
 * optimistic chat append with rollback on rejection.
 */

import { ApiClient, ApiError } from './api.js';
import { canSend, entryClass, transcriptFromLog, type ChatEntry } from './chat.js';
import { dragToPosition, renderPatientSvg } from './patient.js';
import { canScore, renderScoreHtml } from './score.js';
import { escapeHtml } from './score.js';
import type { SessionState } from './types.js';

interface Elements {
  scenarioSelect: HTMLSelectElement;
  startButton: HTMLButtonElement;
  task: HTMLElement;
  patientView: HTMLElement;
  chatLog: HTMLElement;
  input: HTMLInputElement;
  sendButton: HTMLButtonElement;
  endButton: HTMLButtonElement;
  scoreButton: HTMLButtonElement;
  scorePanel: HTMLElement;
  banner: HTMLElement;
}

export class App {
  private sessionId: string | null = null;
  private sessionState: 'active' | 'ended' = 'active';
  private logLines: string[] = [];
  private stream: EventSource | null = null;
  private pending: ChatEntry | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly el: Elements,
  ) {}

  async init(): Promise<void> {
    const scenarios = await this.api.listScenarios();
    this.el.scenarioSelect.innerHTML = scenarios
      .map((s) => `<option value="${s.id}">${escapeHtml(s.title)} (${s.category})</option>`)
      .join('');
    this.el.startButton.addEventListener('click', () => void this.start());
    this.el.sendButton.addEventListener('click', () => void this.send());
    this.el.input.addEventListener('keydown', (event) => {
      if (event.key === 'Enter') void this.send();
    });
    this.el.endButton.addEventListener('click', () => void this.end());
    this.el.scoreButton.addEventListener('click', () => void this.score());
    this.el.patientView.addEventListener('pointerdown', (event) => this.beginDrag(event));
    this.refreshControls();
  }

  private async start(): Promise<void> {
    const scenarioId = this.el.scenarioSelect.value;
    if (!scenarioId) return;
    const { session_id } = await this.api.createSession(scenarioId);
    this.sessionId = session_id;
    this.sessionState = 'active';
    this.logLines = [];
    this.renderChat();
    await this.refreshState();
    this.openStream();
    this.refreshControls();
  }

  private openStream(): void {
    if (!this.sessionId) return;
    this.stream?.close();
    this.stream = new EventSource(this.api.eventsUrl(this.sessionId));
    this.stream.onmessage = (event) => {
      this.logLines.push(event.data as string);
      this.pending = null;
      this.renderChat();
      void this.refreshState();
      this.el.banner.hidden = true;
    };
    this.stream.addEventListener('end', () => {
      this.sessionState = 'ended';
      this.stream?.close();
      this.refreshControls();
    });
    this.stream.onerror = () => {
      // The live view may be stale until the stream reconnects.
      this.el.banner.hidden = false;
    };
  }

  private async refreshState(): Promise<void> {
    if (!this.sessionId) return;
    const state: SessionState = await this.api.getState(this.sessionId);
    this.sessionState = state.session_state;
    this.el.task.textContent = state.task_description;
    this.el.patientView.innerHTML = renderPatientSvg(state.observed);
    this.refreshControls();
  }

  private async send(): Promise<void> {
    const text = this.el.input.value;
    if (!this.sessionId || !canSend(text, this.sessionState)) return;
    this.pending = { author: 'student', text: text.trim() };
    this.el.input.value = '';
    this.renderChat();
    try {
      await this.api.sendMessage(this.sessionId, text);
    } catch (error) {
      this.pending = null;
      this.renderChat();
      this.showError(error);
    }
  }

  private beginDrag(event: PointerEvent): void {
    const target = (event.target as Element | null)?.closest('[data-limb]');
    const limb = target?.getAttribute('data-limb');
    if (!limb || !this.sessionId || this.sessionState !== 'active') return;
    const startX = event.clientX;
    const startY = event.clientY;
    const finish = (up: PointerEvent) => {
      window.removeEventListener('pointerup', finish);
      const position = dragToPosition(limb, up.clientX - startX, up.clientY - startY);
      void this.api
        .manipulate(this.sessionId as string, limb, position)
        .then(() => this.refreshState())
        .catch((error) => this.showError(error));
    };
    window.addEventListener('pointerup', finish);
  }

  private async end(): Promise<void> {
    if (!this.sessionId) return;
    try {
      const { summary } = await this.api.endSession(this.sessionId);
      this.sessionState = 'ended';
      this.el.scorePanel.innerHTML = `<h2>Summary</h2><p>${escapeHtml(summary)}</p>`;
      this.refreshControls();
    } catch (error) {
      this.showError(error);
    }
  }

  private async score(): Promise<void> {
    if (!this.sessionId || !canScore(this.sessionState)) return;
    try {
      const report = await this.api.score(this.sessionId);
      this.el.scorePanel.innerHTML = renderScoreHtml(report);
    } catch (error) {
      this.showError(error);
    }
  }

  private renderChat(): void {
    const entries = transcriptFromLog(this.logLines);
    if (this.pending) entries.push(this.pending);
    this.el.chatLog.innerHTML = entries
      .map((e) => `<div class="${entryClass(e.author)}">${escapeHtml(e.text)}</div>`)
      .join('');
    this.el.chatLog.scrollTop = this.el.chatLog.scrollHeight;
  }

  private refreshControls(): void {
    const active = this.sessionId !== null && this.sessionState === 'active';
    this.el.sendButton.disabled = !active;
    this.el.input.disabled = !active;
    this.el.endButton.disabled = !active;
    this.el.scoreButton.disabled = !(this.sessionId !== null && canScore(this.sessionState));
  }

  private showError(error: unknown): void {
    const message = error instanceof ApiError ? error.detail : String(error);
    this.el.banner.hidden = false;
    this.el.banner.textContent = message;
  }
}

export function mount(api: ApiClient, root: Document): App {
  const byId = <T extends HTMLElement>(id: string): T => {
    const node = root.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  };
  const app = new App(api, {
    scenarioSelect: byId('scenario-select'),
    startButton: byId('start-button'),
    task: byId('task'),
    patientView: byId('patient-view'),
    chatLog: byId('chat-log'),
    input: byId('chat-input'),
    sendButton: byId('send-button'),
    endButton: byId('end-button'),
    scoreButton: byId('score-button'),
    scorePanel: byId('score-panel'),
    banner: byId('banner'),
  });
  void app.init();
  return app;
}
