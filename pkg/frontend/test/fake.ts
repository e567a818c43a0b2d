/** In-memory fake of the upsell service, speaking the documented HTTP API.
 *
 * Mirrors the service's campaign semantics — paused/enabled lifecycle, the
 * enable invariants, channel validation, 1-based variant choice, funnel
 * counters with the orphan-conversion guard — so session tests exercise the
 * console against realistic responses without a running backend.
 */

import { AdCopyDoc, FetchLike, MessageDoc, StatsDoc } from "../src/api.js";

const CHANNELS = new Set(["wifi", "tv", "app"]);

interface SuggestBody {
  task?: string;
  topic?: string;
  emotion?: string;
  tone?: string;
  language?: string;
  lengthWords?: number;
  includeEmoticon?: boolean;
  copies?: number;
}

function problem(status: number, code: string, message: string): Response {
  return new Response(JSON.stringify({ code, message, detail: null }), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function ok(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function makeCopies(body: SuggestBody): AdCopyDoc[] {
  const copies = body.copies ?? 3;
  const docs: AdCopyDoc[] = [];
  for (let index = 1; index <= copies; index += 1) {
    const words = [`${body.topic ?? "offer"}`, `${body.emotion ?? "joy"}`, `variant`, `${index}`];
    while (words.length < (body.lengthWords ?? 15)) {
      words.push(`filler${words.length}`);
    }
    let text = words.join(" ");
    if (body.language !== undefined) {
      text = `[${body.language}] ${text}`;
    }
    if (body.includeEmoticon) {
      text = `${text} 🎉`;
    }
    docs.push({
      text,
      index,
      wordCount: text.split(" ").length,
      hasEmoticon: body.includeEmoticon ?? false,
    });
  }
  return docs;
}

export class FakeService {
  /** When set, /ads/suggest answers 503 like a dead live backend. */
  outage = false;

  private messages = new Map<string, MessageDoc>();
  private impressions = new Map<string, number>();
  private clicks = new Map<string, number>();
  private conversions = new Map<string, number>();
  private seenImpressions = new Set<string>();
  private nextId = 1;
  private ticks = 0;

  private now(): string {
    this.ticks += 1;
    return new Date(Date.UTC(2024, 2, 1, 12, 0, this.ticks)).toISOString().slice(0, 19);
  }

  fetch: FetchLike = async (url, init) => {
    const parsed = new URL(url);
    const method = init?.method ?? "GET";
    const body = init?.body ? (JSON.parse(init.body as string) as Record<string, unknown>) : {};
    return this.dispatch(method, parsed.pathname, body);
  };

  private dispatch(method: string, path: string, body: Record<string, unknown>): Response {
    if (method === "POST" && path === "/ads/suggest") {
      if (this.outage) {
        return problem(503, "BackendUnavailable", "the copy backend is not reachable");
      }
      return ok(makeCopies(body as SuggestBody));
    }
    if (method === "POST" && path === "/messages") {
      return this.createMessage(body);
    }
    if (method === "GET" && path === "/messages") {
      return ok([...this.messages.values()]);
    }
    if (method === "POST" && path === "/events") {
      return this.recordEvent(body);
    }

    const match = path.match(/^\/messages\/([^/]+)(?:\/([a-z]+))?$/);
    if (match === null) {
      return problem(404, "NotFound", `no route ${method} ${path}`);
    }
    const [, id, verb] = match;
    const message = this.messages.get(id ?? "");
    if (message === undefined) {
      return problem(404, "NotFound", `no message ${id}`);
    }
    if (method === "GET" && verb === undefined) {
      return ok(message);
    }
    if (method === "GET" && verb === "stats") {
      return ok(this.stats(message.id));
    }
    if (method !== "POST") {
      return problem(404, "NotFound", `no route ${method} ${path}`);
    }
    switch (verb) {
      case "status":
        return this.setStatus(message, body);
      case "channels":
        return this.setChannels(message, body);
      case "variant":
        return this.chooseVariant(message, body);
      case "variants":
        return this.setVariants(message, body);
      case "translations":
        return this.addTranslation(message, body);
      default:
        return problem(404, "NotFound", `no route ${method} ${path}`);
    }
  }

  private createMessage(body: Record<string, unknown>): Response {
    const name = body.name;
    if (typeof name !== "string" || name.trim() === "") {
      return problem(422, "MalformedBody", "message 'name' must be a non-empty string");
    }
    for (const existing of this.messages.values()) {
      if (existing.name === name) {
        return problem(409, "DuplicateName", `a message named ${name} already exists`);
      }
    }
    const stamp = this.now();
    const message: MessageDoc = {
      id: `msg-${String(this.nextId).padStart(6, "0")}`,
      accommodationId: "smp",
      name,
      title: (body.title as Record<string, string> | undefined) ?? {},
      status: "paused",
      channels: [],
      spec: null,
      variants: body.spec !== undefined ? makeCopies(body.spec as SuggestBody) : [],
      chosenVariant: null,
      category: null,
      createdAt: stamp,
      updatedAt: stamp,
    };
    this.nextId += 1;
    this.messages.set(message.id, message);
    return ok(message, 201);
  }

  private touch(message: MessageDoc, changes: Partial<MessageDoc>): Response {
    const updated = { ...message, ...changes, updatedAt: this.now() };
    this.messages.set(message.id, updated);
    return ok(updated);
  }

  private setStatus(message: MessageDoc, body: Record<string, unknown>): Response {
    const status = body.status;
    if (status !== "paused" && status !== "enabled") {
      return problem(422, "MalformedBody", `unknown status ${String(status)}`);
    }
    if (status === "enabled" && message.channels.length === 0) {
      return problem(409, "InvariantViolation", "an enabled message needs at least one channel");
    }
    if (status === "enabled" && message.chosenVariant === null) {
      return problem(409, "InvariantViolation", "an enabled message needs a chosen variant");
    }
    return this.touch(message, { status });
  }

  private setChannels(message: MessageDoc, body: Record<string, unknown>): Response {
    const requested = body.channels;
    if (!Array.isArray(requested)) {
      return problem(422, "MalformedBody", "body must contain a 'channels' list");
    }
    const channels: MessageDoc["channels"] = [];
    for (const channel of requested) {
      if (typeof channel !== "string" || !CHANNELS.has(channel)) {
        return problem(409, "InvariantViolation", `unknown channel ${String(channel)}`);
      }
      if (!channels.includes(channel as MessageDoc["channels"][number])) {
        channels.push(channel as MessageDoc["channels"][number]);
      }
    }
    if (message.status === "enabled" && channels.length === 0) {
      return problem(409, "InvariantViolation", "an enabled message needs at least one channel");
    }
    return this.touch(message, { channels });
  }

  private chooseVariant(message: MessageDoc, body: Record<string, unknown>): Response {
    const index = body.index;
    if (typeof index !== "number" || !Number.isInteger(index)) {
      return problem(422, "MalformedBody", "body must contain an integer 'index'");
    }
    if (index < 1 || index > message.variants.length) {
      return problem(
        409,
        "InvariantViolation",
        `variant index ${index} out of range 1..${message.variants.length}`,
      );
    }
    return this.touch(message, { chosenVariant: index });
  }

  private setVariants(message: MessageDoc, body: Record<string, unknown>): Response {
    const variants = body.variants;
    if (!Array.isArray(variants) || variants.some((v) => typeof v?.text !== "string")) {
      return problem(422, "MalformedBody", "body must contain a 'variants' list of copy documents");
    }
    let chosen = message.chosenVariant;
    if (chosen !== null && chosen > variants.length) {
      chosen = null;
    }
    return this.touch(message, { variants: variants as AdCopyDoc[], chosenVariant: chosen });
  }

  private addTranslation(message: MessageDoc, body: Record<string, unknown>): Response {
    const { language, title } = body;
    if (typeof language !== "string" || typeof title !== "string" || language.trim() === "") {
      return problem(422, "MalformedBody", "body must contain 'language' and 'title' strings");
    }
    return this.touch(message, { title: { ...message.title, [language]: title } });
  }

  private recordEvent(body: Record<string, unknown>): Response {
    for (const field of ["messageId", "reservationNumber", "kind"]) {
      if (!(field in body)) {
        return problem(422, "MalformedBody", `event is missing '${field}'`);
      }
    }
    const id = String(body.messageId);
    if (!this.messages.has(id)) {
      return problem(404, "NotFound", `no message ${id}`);
    }
    const kind = String(body.kind);
    const pair = `${id}:${String(body.reservationNumber)}`;
    if (kind === "impression") {
      this.impressions.set(id, (this.impressions.get(id) ?? 0) + 1);
      this.seenImpressions.add(pair);
    } else if (kind === "click") {
      this.clicks.set(id, (this.clicks.get(id) ?? 0) + 1);
    } else if (kind === "conversion") {
      if (!this.seenImpressions.has(pair)) {
        return problem(409, "OrphanConversion", "conversion without a prior impression");
      }
      this.conversions.set(id, (this.conversions.get(id) ?? 0) + 1);
    } else {
      return problem(422, "MalformedBody", `unknown event kind ${kind}`);
    }
    return ok({ status: "ok" });
  }

  stats(id: string): StatsDoc {
    const impressions = this.impressions.get(id) ?? 0;
    const conversions = this.conversions.get(id) ?? 0;
    return {
      messageId: id,
      impressions,
      clicks: this.clicks.get(id) ?? 0,
      conversions,
      conversionRate: impressions === 0 ? 0 : conversions / impressions,
    };
  }
}
