/** Browser entry point.
 *
 * Mounts the console into ``#guestlift-console``; the service base URL and
 * accommodation come from data attributes on that element.
 */

import { Channel, ConsoleApi } from "./api.js";
import { ConsoleSession } from "./session.js";
import { renderEditor, renderStats } from "./render.js";

const DEFAULT_SUGGESTION_FORM = {
  task: "a special offer",
  topic: "Spa",
  emotion: "excitement",
  tone: "funny",
  copies: 3,
};

async function redraw(root: HTMLElement, session: ConsoleSession): Promise<void> {
  const listing = await session.api.listMessages();
  const rows = listing
    .map((m) => `<li><button data-open="${m.id}">${m.name} (${m.status})</button></li>`)
    .join("");
  let panels = "";
  if (session.message !== null) {
    await session.refreshStats();
    panels = renderEditor(session.message, session.lastError);
    if (session.stats !== null) {
      panels += renderStats(session.stats);
    }
  }
  root.innerHTML = `<ul class="message-list">${rows}</ul>
<button class="new-message">New message</button>
${panels}`;
}

function wire(root: HTMLElement, session: ConsoleSession): void {
  root.addEventListener("click", (event) => {
    const target = event.target;
    if (!(target instanceof HTMLElement)) {
      return;
    }
    void (async () => {
      if (target.dataset.open !== undefined) {
        await session.open(target.dataset.open);
      } else if (target.classList.contains("new-message")) {
        const name = window.prompt("Message name");
        if (!name) {
          return;
        }
        await session.createMessage(name);
      } else if (target.classList.contains("magic")) {
        await session.requestSuggestions(session.message?.spec ?? DEFAULT_SUGGESTION_FORM);
        if (session.suggestions.length > 0) {
          await session.adoptVariant(1);
        }
      } else if (target.dataset.adopt !== undefined) {
        await session.adoptVariant(Number(target.dataset.adopt));
      } else if (target.classList.contains("add-translation")) {
        const language = window.prompt("Language code (e.g. de)");
        const title = language ? window.prompt(`Title for ${language}`) : null;
        if (language && title) {
          await session.addTranslation(language, title);
        }
      } else if (target instanceof HTMLInputElement && target.name === "enabled") {
        await (target.checked ? session.enable() : session.pause());
      } else if (target instanceof HTMLInputElement && target.name === "channel") {
        const checked = root.querySelectorAll<HTMLInputElement>("input[name=channel]:checked");
        await session.setChannels(Array.from(checked, (box) => box.value as Channel));
      } else {
        return;
      }
      await redraw(root, session);
    })();
  });
}

export async function main(): Promise<void> {
  const root = document.getElementById("guestlift-console");
  if (root === null) {
    throw new Error("missing #guestlift-console mount point");
  }
  const api = new ConsoleApi(
    root.dataset.serviceUrl ?? "http://127.0.0.1:8000",
    root.dataset.accommodation ?? "smp",
  );
  const session = new ConsoleSession(api);
  wire(root, session);
  await redraw(root, session);
}

if (typeof document !== "undefined") {
  void main();
}
