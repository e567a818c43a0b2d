/** Typed client for the upsell service HTTP API.
 *
 * Every method maps to exactly one documented endpoint and returns the
 * service's response document unchanged; the console holds no state the
 * service did not send back.
 */

export interface ProblemDoc {
  code: string;
  message: string;
  detail?: unknown;
}

/** Non-2xx response, carrying the service's problem document. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly problem: ProblemDoc,
  ) {
    super(`${problem.code}: ${problem.message}`);
    this.name = "ServiceError";
  }
}

export interface AdCopyDoc {
  text: string;
  index: number;
  wordCount: number;
  hasEmoticon: boolean;
}

/** The suggestion form; field names match the /ads/suggest request body. */
export interface AdSpecForm {
  task: string;
  topic: string;
  emotion: string;
  tone: string;
  language?: string;
  lengthWords?: number;
  includeEmoticon?: boolean;
  copies?: number;
  style?: string;
}

export type MessageStatus = "paused" | "enabled";
export type Channel = "wifi" | "tv" | "app";

export interface MessageDoc {
  id: string;
  accommodationId: string;
  name: string;
  /** Language code → title text; translations of the message live here. */
  title: Record<string, string>;
  status: MessageStatus;
  channels: Channel[];
  spec: AdSpecForm | null;
  variants: AdCopyDoc[];
  /** 1-based index into variants, or null while none is chosen. */
  chosenVariant: number | null;
  category: Record<string, string> | null;
  createdAt: string;
  updatedAt: string;
}

export interface StatsDoc {
  messageId: string;
  impressions: number;
  clicks: number;
  conversions: number;
  conversionRate: number;
}

export type EventKind = "impression" | "click" | "conversion";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ConsoleApi {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string,
    readonly accommodation: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    withAcm = true,
  ): Promise<T> {
    const query = withAcm ? `?acm=${encodeURIComponent(this.accommodation)}` : "";
    const response = await this.fetchImpl(`${this.baseUrl}${path}${query}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const doc: unknown = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const problem =
        doc !== null && typeof doc === "object" && "code" in doc
          ? (doc as ProblemDoc)
          : { code: `HTTP_${response.status}`, message: text || response.statusText };
      throw new ServiceError(response.status, problem);
    }
    return doc as T;
  }

  suggestAds(spec: AdSpecForm): Promise<AdCopyDoc[]> {
    return this.request("POST", "/ads/suggest", spec, false);
  }

  createMessage(payload: {
    name: string;
    title?: Record<string, string>;
    spec?: AdSpecForm;
    generate?: boolean;
  }): Promise<MessageDoc> {
    return this.request("POST", "/messages", payload);
  }

  listMessages(): Promise<MessageDoc[]> {
    return this.request("GET", "/messages");
  }

  getMessage(id: string): Promise<MessageDoc> {
    return this.request("GET", `/messages/${id}`);
  }

  setStatus(id: string, status: MessageStatus): Promise<MessageDoc> {
    return this.request("POST", `/messages/${id}/status`, { status });
  }

  setChannels(id: string, channels: Channel[]): Promise<MessageDoc> {
    return this.request("POST", `/messages/${id}/channels`, { channels });
  }

  setVariants(id: string, variants: AdCopyDoc[]): Promise<MessageDoc> {
    return this.request("POST", `/messages/${id}/variants`, { variants });
  }

  chooseVariant(id: string, index: number): Promise<MessageDoc> {
    return this.request("POST", `/messages/${id}/variant`, { index });
  }

  addTranslation(id: string, language: string, title: string): Promise<MessageDoc> {
    return this.request("POST", `/messages/${id}/translations`, { language, title });
  }

  messageStats(id: string): Promise<StatsDoc> {
    return this.request("GET", `/messages/${id}/stats`);
  }

  recordEvent(
    messageId: string,
    reservationNumber: string,
    kind: EventKind,
  ): Promise<{ status: string }> {
    return this.request("POST", "/events", { messageId, reservationNumber, kind });
  }
}
