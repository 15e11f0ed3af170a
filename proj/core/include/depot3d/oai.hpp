#pragma once

#include <map>
#include <string>
#include <vector>

#include "depot3d/service.hpp"

namespace depot3d {

struct OaiContext {
  std::string base_url;          // e.g. http://host:port/oai
  std::string repository_name;
  std::string admin_email;
  std::string earliest_datestamp = "1970-01-01T00:00:00Z";
  std::size_t page_size = 100;
};

using OaiArguments = std::multimap<std::string, std::string>;

/// OAI-PMH 2.0 data provider over a snapshot of items ordered by
/// (datestamp, identifier). Implements Identify, ListMetadataFormats,
/// ListIdentifiers, ListRecords and GetRecord with oai_dc only. Protocol
/// errors are returned in-band as <error code="..."> elements.
std::string oai_handle(const OaiContext& ctx, const OaiArguments& args, const std::vector<OaiItem>& items,
                       const std::string& response_date);

/// oai_dc serialization of a Dublin Core record (qualified terms are
/// mapped onto their simple parent elements).
std::string oai_dc_xml(const DublinCoreRecord& dc);

}  // namespace depot3d
