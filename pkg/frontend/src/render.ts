/** String renderers for the two console panels.
 *
 * Pure functions from service documents to HTML, so tests can assert that
 * every displayed number is a service response field.
 */

import { Channel, MessageDoc, StatsDoc } from "./api.js";
import { formatCount, formatRate, formatStamp, formatUplift } from "./format.js";

const ALL_CHANNELS: Channel[] = ["wifi", "tv", "app"];

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderEditor(message: MessageDoc, error: string | null = null): string {
  const channelBoxes = ALL_CHANNELS.map((channel) => {
    const checked = message.channels.includes(channel) ? " checked" : "";
    return `<label><input type="checkbox" name="channel" value="${channel}"${checked}> ${channel}</label>`;
  }).join("\n    ");

  const titles = Object.entries(message.title)
    .map(
      ([language, text]) =>
        `<div class="title-row" data-language="${escapeHtml(language)}">` +
        `<span class="language">${escapeHtml(language)}</span>` +
        `<input type="text" value="${escapeHtml(text)}"></div>`,
    )
    .join("\n    ");

  const variants = message.variants
    .map((variant) => {
      const chosen = message.chosenVariant === variant.index ? " class=\"chosen\"" : "";
      return `<li${chosen}>${escapeHtml(variant.text)} <button data-adopt="${variant.index}">ADOPT</button></li>`;
    })
    .join("\n    ");

  const inlineError = error === null ? "" : `\n  <p class="error" role="alert">${escapeHtml(error)}</p>`;

  return `<section class="message-editor" data-message-id="${escapeHtml(message.id)}">
  <h2>${escapeHtml(message.name)}</h2>
  <label class="status-toggle">
    <input type="checkbox" name="enabled"${message.status === "enabled" ? " checked" : ""}> enabled
  </label>${inlineError}
  <fieldset class="channels">
    <legend>Distribution channels</legend>
    ${channelBoxes}
  </fieldset>
  <div class="titles">
    ${titles}
    <button class="add-translation">+ TRANSLATIONS</button>
  </div>
  <div class="suggestions">
    <button class="magic">DO SOME MAGIC</button>
    <ol class="variants">
    ${variants}
    </ol>
  </div>
  <footer>updated ${formatStamp(message.updatedAt)}</footer>
</section>`;
}

export function renderStats(stats: StatsDoc, baseline: StatsDoc | null = null): string {
  const upliftRow =
    baseline === null
      ? ""
      : `\n  <dt>uplift vs ${escapeHtml(baseline.messageId)}</dt>` +
        `<dd>${formatUplift(baseline.conversionRate, stats.conversionRate)}</dd>`;
  return `<dl class="message-stats" data-message-id="${escapeHtml(stats.messageId)}">
  <dt>impressions</dt><dd>${formatCount(stats.impressions)}</dd>
  <dt>clicks</dt><dd>${formatCount(stats.clicks)}</dd>
  <dt>conversions</dt><dd>${formatCount(stats.conversions)}</dd>
  <dt>conversion rate</dt><dd>${formatRate(stats.conversionRate, stats.impressions)}</dd>${upliftRow}
</dl>`;
}
