/**
 * DOM rendering and interaction for the store page.
 *
 * Layout: a catalog list on the left, a detail pane for the selected skill
 * on the right. The detail pane always shows the source link and every
 * topic from the manifest verbatim before offering installation.
 */

import { StoreClient } from "./api.js";
import {
  SkillCard,
  beginInstall,
  canInstall,
  cardFromEntry,
  finishInstall,
} from "./cards.js";

export class App {
  private cards: SkillCard[] = [];
  private selected: string | null = null;

  constructor(private readonly root: HTMLElement,
              private readonly client: StoreClient) {}

  async load(): Promise<void> {
    this.root.replaceChildren(el("p", { class: "loading" }, "loading catalog..."));
    try {
      const entries = await this.client.listSkills();
      this.cards = entries.map(cardFromEntry);
      if (this.selected && !this.cards.some((c) => c.name === this.selected)) {
        this.selected = null;
      }
    } catch (err) {
      this.renderError(err instanceof Error ? err.message : String(err));
      return;
    }
    this.render();
  }

  private renderError(message: string): void {
    // No partial UI: the banner and retry button replace everything.
    const retry = el("button", { class: "retry" }, "retry") as HTMLButtonElement;
    retry.addEventListener("click", () => void this.load());
    this.root.replaceChildren(
      el("div", { class: "error-banner", role: "alert" },
        el("p", {}, `store unreachable: ${message}`),
        retry),
    );
  }

  private render(): void {
    const heading = el("h1", {}, "skill store");
    if (this.cards.length === 0) {
      this.root.replaceChildren(
        heading,
        el("p", { class: "empty-state" }, "No skills in this catalog yet."),
      );
      return;
    }
    const list = el("ul", { class: "catalog" },
      ...this.cards.map((card) => this.renderCard(card)));
    const detail = this.selectedCard()
      ? this.renderDetail(this.selectedCard() as SkillCard)
      : el("p", { class: "detail-hint" }, "Select a skill to inspect its permissions.");
    this.root.replaceChildren(
      heading,
      el("div", { class: "columns" },
        list,
        el("section", { class: "detail", "data-testid": "detail" }, detail)),
    );
  }

  private selectedCard(): SkillCard | undefined {
    return this.cards.find((c) => c.name === this.selected);
  }

  private renderCard(card: SkillCard): HTMLElement {
    const badges = el("span", { class: "badges" },
      ...card.badges.map((b) =>
        el("span", { class: `badge badge-${b.severity}`, "data-kind": b.kind },
          b.kind)));
    const item = el("li",
      {
        class: "card" + (card.name === this.selected ? " selected" : ""),
        "data-testid": `card-${card.name}`,
      },
      el("span", { class: "card-name" }, card.name),
      el("span", { class: "card-desc" }, card.description),
      badges,
      installBadge(card),
    );
    item.addEventListener("click", () => {
      this.selected = card.name;
      this.render();
    });
    return item;
  }

  private renderDetail(card: SkillCard): HTMLElement {
    const topics = (label: string, values: string[]) =>
      el("div", { class: "topic-block" },
        el("h3", {}, label),
        values.length
          ? el("ul", { class: "topics" },
              ...values.map((t) => el("li", { class: "topic" }, t)))
          : el("p", { class: "topics-none" }, "(none)"));

    const warnings = card.badges.length
      ? el("ul", { class: "warnings" },
          ...card.badges.map((b) =>
            el("li", { class: `warning warning-${b.severity}`, "data-kind": b.kind },
              el("strong", {}, `${b.kind} (${b.severity}): `),
              b.detail)))
      : el("p", { class: "warnings-none" }, "No permission warnings.");

    const install = this.renderInstall(card);

    return el("div", { class: "detail-pane" },
      el("h2", {}, card.name),
      el("p", { class: "description" }, card.description || "(no description)"),
      el("p", { class: "source" },
        "source: ",
        el("a", { href: card.sourceUrl, class: "source-link" }, card.sourceUrl)),
      el("h3", {}, "permission notifications"),
      warnings,
      topics("topics read", card.topicsRead),
      topics("topics written", card.topicsWrite),
      card.manifestFlags.containerFlags
        ? el("p", { class: "container-flags" },
            `container flags: ${card.manifestFlags.containerFlags}`)
        : el("span", {}),
      install,
    );
  }

  private renderInstall(card: SkillCard): HTMLElement {
    const status = installBadge(card);
    const button = el("button",
      { class: "install", "data-testid": `install-${card.name}` },
      card.install.phase === "failed" ? "retry install" : "install",
    ) as HTMLButtonElement;
    button.disabled = !canInstall(card);
    button.addEventListener("click", () => void this.install(card.name));
    const parts: HTMLElement[] = [button, status];
    if (card.install.phase === "failed") {
      parts.push(el("p", { class: "install-error" }, card.install.message));
    }
    return el("div", { class: "install-row" }, ...parts);
  }

  async install(name: string): Promise<void> {
    const card = this.cards.find((c) => c.name === name);
    if (!card || !beginInstall(card)) {
      return; // unknown or already in flight
    }
    this.render();
    try {
      await this.client.install(name);
      finishInstall(card);
    } catch (err) {
      finishInstall(card, err instanceof Error ? err.message : String(err));
    }
    this.render();
  }
}

function installBadge(card: SkillCard): HTMLElement {
  return el("span",
    { class: `install-state install-${card.install.phase}`, "data-state": card.install.phase },
    card.install.phase);
}

function el(tag: string, attrs: Record<string, string> = {},
            ...children: (HTMLElement | string)[]): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}
