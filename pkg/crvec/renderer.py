"""
Text rendering of reports.

Reports of the verification harness, the benchmark and the table
generator are rendered from jinja2 templates shipped inside the
respective subpackage.
"""
from jinja2 import Environment, PackageLoader, select_autoescape, StrictUndefined

from .util import format_number, format_timedelta


class TextRenderer(object):
    """
    The text renderer renders human readable reports.

    @ivar environment: the jinja2 environment used to render templates
    @type environment: L{jinja2.Environment}
    """
    def __init__(self, package):
        """
        The default constructor.

        @param package: name of the package containing the "templates" directory
        @type package: L{str}
        """
        assert isinstance(package, str)
        self.environment = Environment(
            loader=PackageLoader(package),
            auto_reload=False,
            autoescape=select_autoescape(),
            undefined=StrictUndefined,
            keep_trailing_newline=True,
            trim_blocks=True,
            lstrip_blocks=True,
        )

        # configure filters
        self.environment.filters["format_number"] = format_number
        self.environment.filters["format_timedelta"] = format_timedelta
        self.environment.filters["hexfloat"] = self._hexfloat
        self.environment.filters["ljust"] = self._ljust

    @staticmethod
    def _hexfloat(value):
        """
        Format a float as C99 hex-float literal.

        @param value: value to format
        @type value: L{float}
        @return: the literal
        @rtype: L{str}
        """
        return float(value).hex()

    @staticmethod
    def _ljust(value, width):
        """
        Pad a value to a column width.

        @param value: value to pad
        @type value: any
        @param width: column width
        @type width: L{int}
        @return: the padded string
        @rtype: L{str}
        """
        return str(value).ljust(width)

    def render(self, template_name, **kwargs):
        """
        Render a template.

        @param template_name: name of the template
        @type template_name: L{str}
        @param kwargs: template variables
        @type kwargs: L{dict}
        @return: the rendered text
        @rtype: L{str}
        """
        template = self.environment.get_template(template_name)
        return template.render(**kwargs)
