/** One editor session over the service API.
 *
 * All state is the latest service response: mutations replace
 * ``this.message`` only after the service confirms them, and a refused
 * mutation (409) leaves the message untouched and surfaces the problem
 * message as an inline error instead.
 */

import {
  AdCopyDoc,
  AdSpecForm,
  Channel,
  ConsoleApi,
  MessageDoc,
  ServiceError,
  StatsDoc,
} from "./api.js";

export class ConsoleSession {
  message: MessageDoc | null = null;
  suggestions: AdCopyDoc[] = [];
  stats: StatsDoc | null = null;
  /** Inline, non-blocking error from the last refused action. */
  lastError: string | null = null;

  constructor(readonly api: ConsoleApi) {}

  private get messageId(): string {
    if (this.message === null) {
      throw new Error("no message selected");
    }
    return this.message.id;
  }

  /** Refusal (409) and backend outage (503) become inline errors; anything
   * else is a bug or a bad deployment and propagates. */
  private async apply(action: () => Promise<MessageDoc>): Promise<void> {
    try {
      this.message = await action();
      this.lastError = null;
    } catch (error) {
      if (error instanceof ServiceError && (error.status === 409 || error.status === 503)) {
        this.lastError = error.problem.message;
        return;
      }
      throw error;
    }
  }

  async createMessage(name: string, title?: Record<string, string>): Promise<void> {
    await this.apply(() => this.api.createMessage({ name, title }));
  }

  async open(id: string): Promise<void> {
    this.message = await this.api.getMessage(id);
    this.lastError = null;
  }

  /** The "DO SOME MAGIC" button: ask the service for ad-copy variants. */
  async requestSuggestions(form: AdSpecForm): Promise<void> {
    try {
      this.suggestions = await this.api.suggestAds(form);
      this.lastError = null;
    } catch (error) {
      if (error instanceof ServiceError && error.status === 503) {
        this.lastError = error.problem.message;
        return;
      }
      throw error;
    }
  }

  /** Adopt a suggestion (1-based) as the message's title for a language:
   * the suggestions become the message's variants, the pick is recorded,
   * and the variant text lands in the title map. */
  async adoptVariant(index: number, language = "en"): Promise<void> {
    const chosen = this.suggestions[index - 1];
    if (chosen === undefined) {
      throw new Error(`no suggestion ${index} to adopt`);
    }
    const id = this.messageId;
    await this.api.setVariants(id, this.suggestions);
    await this.api.chooseVariant(id, index);
    await this.apply(() => this.api.addTranslation(id, language, chosen.text));
  }

  async addTranslation(language: string, title: string): Promise<void> {
    await this.apply(() => this.api.addTranslation(this.messageId, language, title));
  }

  async setChannels(channels: Channel[]): Promise<void> {
    await this.apply(() => this.api.setChannels(this.messageId, channels));
  }

  async enable(): Promise<void> {
    await this.apply(() => this.api.setStatus(this.messageId, "enabled"));
  }

  async pause(): Promise<void> {
    await this.apply(() => this.api.setStatus(this.messageId, "paused"));
  }

  async refreshStats(): Promise<void> {
    this.stats = await this.api.messageStats(this.messageId);
  }
}
